import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semiplanar.graph import graph_distance, hop_distances
from semiplanar.surface import (NotDevelopable, OutsideSafeRegion, SurfaceMesh, SurfacePoint,
                                bilipschitz_measure, c3, face_geometry, face_quadrature,
                                planar_layout, surface_ball_volume, surface_distance)

from conftest import tiling


@pytest.fixture(scope="module")
def sq():
    t = tiling("4^4", 9)
    xy = t.coords - t.coords[t.center]
    return t.graph, t.center, xy, SurfaceMesh(t.graph, 0.05)


@pytest.fixture(scope="module")
def hexa():
    t = tiling("6^3", 9)
    return t.graph, t.center, SurfaceMesh(t.graph, 0.05)


def vertex_at(xy, target):
    return int(np.argmin(np.linalg.norm(xy - np.asarray(target, float), axis=1)))


def safe_vertices(graph, center, margin):
    d = hop_distances(graph, center)
    bd = d[list(graph.boundary)].min()
    return np.flatnonzero((d >= 0) & (d <= bd - margin))


def test_face_geometry_examples():
    sq = face_geometry(4)
    assert sq.circumradius == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
    assert sq.area == pytest.approx(1.0, abs=1e-15)
    assert face_geometry(6).area == pytest.approx(3 * math.sqrt(3) / 2, abs=1e-14)
    assert face_geometry(3).circumradius == pytest.approx(1 / math.sqrt(3), abs=1e-15)
    with pytest.raises(ValueError):
        face_geometry(2)


@given(st.integers(3, 60))
def test_face_geometry_identities(n):
    g = face_geometry(n)
    assert 2 * g.circumradius * math.sin(math.pi / n) == pytest.approx(1.0, abs=1e-14)
    assert g.apothem == pytest.approx(g.circumradius * math.cos(math.pi / n), abs=1e-14)
    assert g.sector_angle * n == pytest.approx(2 * math.pi)
    assert g.diameter <= c3(n) + 1e-15
    # the diameter of a lower-degree face is below c3 of any larger D
    assert g.diameter <= c3(n + 1)


def test_diameter_matches_vertex_pairs():
    for n in range(3, 13):
        g = face_geometry(n)
        ang = 2 * np.pi * np.arange(n) / n
        pts = g.circumradius * np.c_[np.cos(ang), np.sin(ang)]
        diam = np.max(np.linalg.norm(pts[:, None] - pts[None], axis=2))
        assert g.diameter == pytest.approx(diam, abs=1e-14)


def test_surface_point_inside():
    g = tiling("4^4", 2).graph
    a = face_geometry(4).apothem
    assert SurfacePoint(0, a, math.pi / 4).inside(g)
    assert SurfacePoint(0, 0.0, 1.0).inside(g)
    assert not SurfacePoint(0, a + 1e-3, math.pi / 4).inside(g)
    p = SurfacePoint.from_xy(0, 0.1, -0.2)
    assert np.allclose(p.xy(), [0.1, -0.2])


def test_layout_square_lattice(sq):
    g, c, _, _ = sq
    xy = planar_layout(g, root=c)
    assert np.allclose(xy, np.round(xy), atol=1e-9)
    assert np.allclose(xy[c], 0.0)


@pytest.mark.parametrize("kind", ["3^6", "6^3", "4.8.8", "3.12.12", "4.6.12", "3.6.3.6", "3.3.4.3.4"])
def test_layout_edges_unit(kind):
    g = tiling(kind, 5).graph
    xy = planar_layout(g)
    for u in range(g.vertex_count):
        for v in g.rotation[u]:
            assert abs(np.linalg.norm(xy[u] - xy[v]) - 1.0) < 1e-12


def test_layout_matches_generator_up_to_isometry():
    t = tiling("3^6", 5)
    xy = planar_layout(t.graph)
    d_layout = np.linalg.norm(xy[:, None] - xy[None], axis=2)
    d_gen = np.linalg.norm(t.coords[:, None] - t.coords[None], axis=2)
    assert np.allclose(d_layout, d_gen, atol=1e-9)


def test_cap_not_developable(cap):
    g, _ = cap
    with pytest.raises(NotDevelopable, match="not developable"):
        planar_layout(g)


def test_distance_examples(sq):
    g, c, xy, mesh = sq
    assert surface_distance(mesh, c, c)[0] == 0.0
    right = vertex_at(xy, (1, 0))
    d, bound = surface_distance(mesh, c, right)
    assert d == pytest.approx(1.0, abs=1e-12)
    assert bound == 0.0
    diag = vertex_at(xy, (1, 1))
    d, bound = surface_distance(mesh, c, diag)
    assert abs(d - math.sqrt(2)) <= bound + 1e-12
    assert d >= math.sqrt(2) - 1e-12


def test_distance_interior_points(sq):
    g, c, xy, mesh = sq
    f = g.faces_at(c)[0]
    p = SurfacePoint(f, 0.0, 0.0)
    d, bound = surface_distance(mesh, p, c)
    assert d == pytest.approx(math.sqrt(2) / 2, abs=1e-12)
    assert surface_distance(mesh, p, p)[0] == 0.0


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_flat_distance_within_bound(sq, data):
    g, c, xy, mesh = sq
    pool = safe_vertices(g, c, 2)
    u = int(data.draw(st.sampled_from(pool)))
    v = int(data.draw(st.sampled_from(pool)))
    d, bound = mesh.distance(u, v)
    exact = float(np.linalg.norm(xy[u] - xy[v]))
    assert d >= exact - 1e-9
    assert d <= exact + bound + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_symmetry_and_triangle_inequality(hexa, data):
    g, c, mesh = hexa
    pool = safe_vertices(g, c, 2)
    u, v, w = (int(data.draw(st.sampled_from(pool))) for _ in range(3))
    duv = mesh.vertex_distance(u, v)
    assert duv == pytest.approx(mesh.vertex_distance(v, u), abs=1e-12)
    assert duv <= mesh.vertex_distance(u, w) + mesh.vertex_distance(w, v) + 1e-12


def test_distance_monotone_in_h():
    t = tiling("6^3", 6)
    pool = safe_vertices(t.graph, t.center, 2)
    rng = np.random.default_rng(3)
    pairs = rng.choice(pool, size=(10, 2))
    meshes = [SurfaceMesh(t.graph, h) for h in (0.1, 0.05, 0.025)]
    for u, v in pairs:
        ds = [m.vertex_distance(int(u), int(v)) for m in meshes]
        assert ds[0] >= ds[1] - 1e-12 >= ds[2] - 2e-12


def test_upper_bound_by_graph_distance(hexa):
    g, c, mesh = hexa
    pool = safe_vertices(g, c, 2)
    for u in pool[:20]:
        row = mesh.node_distances(int(u))[:g.vertex_count]
        hop = hop_distances(g, int(u))
        assert np.all(row[pool] <= hop[pool] + 1e-9)


def test_unsafe_points_rejected(sq):
    g, c, xy, mesh = sq
    edge = sorted(g.boundary)[0]
    with pytest.raises(OutsideSafeRegion):
        surface_distance(mesh, c, edge)


def quadrature_errors(n, h):
    g = face_geometry(n)
    rule = face_quadrature(n, h)
    # fan of n isosceles triangles: integral of |x|^2 over one is a^3/4 + a/48
    a = g.apothem
    moment = n * (a ** 3 / 4 + a / 48)
    return (abs(rule.weights.sum() / g.area - 1),
            abs(np.dot(rule.weights, (rule.xy ** 2).sum(axis=1)) / moment - 1))


@pytest.mark.parametrize("n", range(3, 13))
def test_quadrature_area_and_polar_moment(n):
    area_err, moment_err = quadrature_errors(n, 0.05)
    assert area_err < 1e-6
    assert moment_err < 1e-5
    # refinement converges
    finer = quadrature_errors(n, 0.025)
    assert finer[0] < area_err and finer[1] < moment_err


def test_quadrature_nodes_inside_polygon():
    g = tiling("4.8.8", 2).graph
    for fid, face in enumerate(g.faces[:6]):
        rule = face_quadrature(len(face), 0.1)
        for x, y in rule.xy[::7]:
            assert SurfacePoint.from_xy(fid, x, y).inside(g, 1e-12)


def test_ball_volume_flat(sq, hexa):
    _, c, _, mesh = sq
    vol, eps = surface_ball_volume(mesh, c, 2.0)
    assert vol == pytest.approx(4 * math.pi, rel=0.01)
    assert eps > 0
    assert surface_ball_volume(mesh, c, 0.0) == (0.0, 0.0)
    _, hc, hmesh = hexa
    vol, _ = surface_ball_volume(hmesh, hc, 2.0)
    assert vol == pytest.approx(4 * math.pi, rel=0.01)


def test_ball_volume_from_interior_point(sq):
    g, c, _, mesh = sq
    p = SurfacePoint(g.faces_at(c)[0], 0.2, 0.3)
    vol, _ = surface_ball_volume(mesh, p, 3.0)
    assert vol == pytest.approx(9 * math.pi, rel=0.01)


def test_ball_outside_safe_region(sq):
    _, c, _, mesh = sq
    with pytest.raises(OutsideSafeRegion):
        surface_ball_volume(mesh, c, 20.0)


def test_bilipschitz_examples(sq):
    g, c, xy, mesh = sq
    right, diag, far = (vertex_at(xy, t) for t in [(1, 0), (1, 1), (3, 3)])
    out = bilipschitz_measure(mesh, [(c, right)])
    assert out["min"] == pytest.approx(1.0, abs=1e-12)
    out = bilipschitz_measure(mesh, [(c, diag), (c, far)])
    assert out["min"] == pytest.approx(math.sqrt(2) / 2, abs=0.02)
    assert out["max"] == pytest.approx(math.sqrt(2) / 2, abs=0.02)
    assert out["count"] == 2
    assert graph_distance(g, c, far) == 6
