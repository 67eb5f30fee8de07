import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semiplanar.graph import graph_ball, hop_distances
from semiplanar.laplace import (DirichletProblem, NonConvergence, ScalarField, ball_problem,
                                graph_mvi_ratio, harnack_ratio, is_harmonic, laplacian,
                                max_residual, solve_dirichlet)


def coord_field(xy, fn):
    return fn(xy[:, 0], xy[:, 1])


def test_laplacian_examples(z2):
    g, c, xy = z2
    assert laplacian(g, np.full(g.vertex_count, 3.0), c) == 0.0
    assert laplacian(g, xy[:, 0], c) == 0.0
    assert laplacian(g, xy[:, 0] ** 2, c) == pytest.approx(0.5, abs=1e-15)


def test_laplacian_missing_neighbour(z2):
    g, c, xy = z2
    f = xy[:, 0].copy()
    f[g.rotation[c][0]] = np.nan
    with pytest.raises(ValueError, match="missing"):
        laplacian(g, f, c)


def test_constant_boundary_gives_constant(z2):
    g, c, _ = z2
    field, report = solve_dirichlet(ball_problem(g, c, 6, lambda v: 2.5))
    ball = graph_ball(g, c, 6)
    assert np.allclose(field.values[list(ball.members)], 2.5, atol=1e-12)
    assert report.converged


@pytest.mark.parametrize("fn", [
    lambda x, y: x,
    lambda x, y: y,
    lambda x, y: x * y,
    lambda x, y: x ** 2 - y ** 2,
], ids=["x", "y", "xy", "x2-y2"])
def test_polynomials_reproduced(z2, fn):
    g, c, xy = z2
    exact = coord_field(xy, fn)
    field, _ = solve_dirichlet(ball_problem(g, c, 8, exact))
    m = list(graph_ball(g, c, 8).members)
    assert np.max(np.abs(field.values[m] - exact[m])) <= 1e-9


def test_residual_and_domain(z2):
    g, c, xy = z2
    field, report = solve_dirichlet(ball_problem(g, c, 5, xy[:, 0] ** 2))
    interior = field.domain["interior"]
    assert max_residual(g, field, interior) <= 1e-12
    assert report.residual <= 1e-12
    assert is_harmonic(g, field, interior)
    dist = hop_distances(g, c)
    assert set(field.domain["boundary"]) == set(np.flatnonzero(dist == 6).tolist())
    # undefined outside the closed ball
    assert not np.isfinite(field.values[np.flatnonzero(dist > 6)]).any()


def test_missing_boundary_values(z2):
    g, c, _ = z2
    members = graph_ball(g, c, 2).members
    with pytest.raises(ValueError, match="boundary values missing"):
        DirichletProblem(g, members, {})


def test_interior_on_truncation_boundary_rejected(z2):
    g, _, _ = z2
    b = sorted(g.boundary)[0]
    nbrs = {w: 0.0 for w in g.rotation[b]}
    with pytest.raises(ValueError):
        DirichletProblem(g, (b,), nbrs)


def test_nonconvergence_reported(z2):
    g, c, xy = z2
    problem = ball_problem(g, c, 6, xy[:, 0] ** 3, tol=1e-30, max_iter=3)
    with pytest.raises(NonConvergence) as exc:
        solve_dirichlet(problem)
    assert exc.value.report.residual > 0


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**31 - 1))
def test_maximum_principle(z2, R, seed):
    g, c, _ = z2
    rng = np.random.default_rng(seed)
    data = rng.uniform(-5, 5, g.vertex_count)
    field, _ = solve_dirichlet(ball_problem(g, c, R, data))
    bvals = field.values[list(field.domain["boundary"])]
    inner = field.values[list(field.domain["interior"])]
    assert inner.min() >= bvals.min() - 1e-12
    assert inner.max() <= bvals.max() + 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity_and_uniqueness(z2, seed, a, b):
    g, c, _ = z2
    rng = np.random.default_rng(seed)
    g1, g2 = rng.normal(size=(2, g.vertex_count))
    s1, _ = solve_dirichlet(ball_problem(g, c, 5, g1))
    s2, _ = solve_dirichlet(ball_problem(g, c, 5, g2))
    s, _ = solve_dirichlet(ball_problem(g, c, 5, a * g1 + b * g2))
    again, _ = solve_dirichlet(ball_problem(g, c, 5, a * g1 + b * g2))
    m = list(s.domain["interior"])
    scale = 1 + abs(a) + abs(b)
    assert np.allclose(s.values[m], a * s1.values[m] + b * s2.values[m], atol=1e-10 * scale)
    assert np.array_equal(s.values[m], again.values[m])


def test_harnack_examples(z2):
    g, c, xy = z2
    assert harnack_ratio(g, c, 3, np.full(g.vertex_count, 4.0)) == 1.0
    assert harnack_ratio(g, c, 2, 10 + xy[:, 0]) == pytest.approx(1.5)


def test_harnack_errors(z2):
    g, c, xy = z2
    with pytest.raises(ValueError, match="positive"):
        harnack_ratio(g, c, 2, xy[:, 0])
    with pytest.raises(ValueError, match="harmonic"):
        harnack_ratio(g, c, 2, 10 + xy[:, 0] ** 2)


def test_mvi_examples(z2):
    g, c, xy = z2
    assert graph_mvi_ratio(g, c, 3, np.ones(g.vertex_count)) == pytest.approx(1.0)
    assert graph_mvi_ratio(g, c, 2, xy[:, 0]) == 0.0
    assert graph_mvi_ratio(g, c, 2, np.zeros(g.vertex_count)) == 0.0


def test_ball_average_is_degree_weighted(z2):
    g, c, xy = z2
    f = ScalarField(xy[:, 0] + 1.0)
    # odd symmetry of x about the center
    assert f.ball_average(g, c, 4) == pytest.approx(1.0)


def test_field_roundtrip():
    f = ScalarField(np.array([1.0, np.nan, -2.5]), {"kind": "test"})
    back = ScalarField.from_dict(f.to_dict())
    assert back.to_dict() == f.to_dict()
    assert np.isnan(back.values[1])
