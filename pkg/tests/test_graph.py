from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semiplanar.graph import (GraphValidationError, InsufficientTruncation, SemiplanarGraph, dual,
                              from_faces, graph_ball, graph_distance, hop_distances,
                              is_nonneg_curvature, max_safe_radius, total_angle, truncate,
                              validate, vertex_curvature)
from semiplanar.tilings import fan_patch, polyhedron

from conftest import tiling


def square():
    # a lone quadrilateral is not a valid closed graph: degrees are 2
    return [[1, 3], [2, 0], [3, 1], [0, 2]]


def test_validate_reports_low_degree_without_raising():
    res = validate(square())
    assert not res.ok
    assert any("degree" in e for e in res.errors)


@pytest.mark.parametrize("rotation, needle", [
    ([[0, 1, 2], [0, 2, 3], [0, 1, 3], [1, 2, 0]], "loop"),
    ([[1, 1, 2], [0, 0, 2], [0, 1, 3], [2, 1, 0]], "multi-edge"),
    ([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1]], "dangling"),
])
def test_validate_messages(rotation, needle):
    res = validate(rotation)
    assert not res.ok
    assert any(needle in e for e in res.errors), res.errors


def test_constructor_raises_with_errors():
    with pytest.raises(GraphValidationError) as exc:
        SemiplanarGraph(square())
    assert exc.value.errors


@pytest.mark.parametrize("kind, n_faces, phi", [
    ("tetrahedron", 4, Fraction(1, 2)),
    ("cube", 6, Fraction(1, 4)),
    ("octahedron", 8, Fraction(1, 3)),
    ("icosahedron", 20, Fraction(1, 6)),
    ("dodecahedron", 12, Fraction(1, 10)),
])
def test_polyhedra_curvature_and_gauss_bonnet(kind, n_faces, phi):
    g = polyhedron(kind)
    assert len(g.faces) == n_faces
    assert g.euler_characteristic() == 2
    curv = {vertex_curvature(g, v) for v in range(g.vertex_count)}
    assert curv == {phi}
    # total curvature equals the Euler characteristic
    assert phi * g.vertex_count == 2


def test_total_angle_matches_curvature():
    g = polyhedron("icosahedron")
    # five triangles meet at each vertex: 5 * pi/3
    assert total_angle(g, 0) == pytest.approx(5 * np.pi / 3, abs=1e-14)


def test_negative_curvature_patch_is_flagged():
    g, c = fan_patch((3,) * 7)
    assert vertex_curvature(g, c) == Fraction(-1, 6)
    ok, bad, skipped = is_nonneg_curvature(g)
    assert not ok and bad == [c]
    assert set(skipped) == set(g.boundary)


def test_curvature_refuses_boundary_vertices(cap):
    g, c = cap
    b = sorted(g.boundary)[0]
    with pytest.raises(ValueError):
        vertex_curvature(g, b)
    assert vertex_curvature(g, c) == Fraction(1, 10)


def test_dual_of_cube_is_octahedron():
    d = dual(polyhedron("cube"))
    assert d.vertex_count == 6 and len(d.faces) == 8
    assert set(d.face_degrees) == {3}


def test_ball_counts_on_square_lattice():
    t = tiling("4^4", 12)
    for R in range(13):
        ball = graph_ball(t.graph, t.center, R)
        assert ball.count == 2 * R * R + 2 * R + 1
        assert ball.volume == 4 * ball.count


def test_ball_refuses_truncation_boundary():
    t = tiling("4^4", 4)
    S = max_safe_radius(t.graph, t.center)
    graph_ball(t.graph, t.center, S)
    with pytest.raises(InsufficientTruncation):
        graph_ball(t.graph, t.center, S + 1)


def test_from_faces_builds_boundary_fans():
    g, old = from_faces([(0, 1, 2), (0, 2, 3), (0, 3, 1)])
    c = old.index(0)
    assert g.is_interior(c)
    assert len(g.boundary) == 3
    assert vertex_curvature(g, c) == Fraction(1, 2)


def test_truncate_keeps_interior_ball():
    big = tiling("3^6", 8)
    sub, c, old = truncate(big.graph, big.center, 3)
    assert graph_ball(sub, c, 3).count == graph_ball(big.graph, big.center, 3).count
    for v in graph_ball(sub, c, 3).members:
        assert vertex_curvature(sub, v) == 0


def test_to_dict_roundtrip():
    g = polyhedron("octahedron")
    h = SemiplanarGraph(g.to_dict()["rotation"], g.to_dict()["boundary"])
    assert h.faces == g.faces


@settings(max_examples=30, deadline=None)
@given(st.permutations(range(12)))
def test_relabelling_preserves_curvature_and_faces(perm):
    g = polyhedron("icosahedron")
    inv = {old: new for new, old in enumerate(perm)}
    rot = [None] * 12
    for old in range(12):
        rot[inv[old]] = [inv[w] for w in g.rotation[old]]
    h = SemiplanarGraph(rot)
    assert sorted(h.face_degrees) == sorted(g.face_degrees)
    assert all(vertex_curvature(h, inv[v]) == vertex_curvature(g, v) for v in range(12))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000), st.integers(0, 10_000))
def test_hop_distance_is_a_metric(a, b, c):
    g = tiling("4.8.8", 6).graph
    n = g.vertex_count
    a, b, c = a % n, b % n, c % n
    dab, dbc, dac = graph_distance(g, a, b), graph_distance(g, b, c), graph_distance(g, a, c)
    assert dab == graph_distance(g, b, a)
    assert dac <= dab + dbc
    assert (dab == 0) == (a == b)


def test_hop_distances_cached_read_only():
    g = tiling("4^4", 4).graph
    d = hop_distances(g, 0)
    assert d is hop_distances(g, 0)
    with pytest.raises(ValueError):
        d[0] = 5
