"""Discrete Laplacian, Dirichlet solves and ball measurements on graphs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import SemiplanarGraph, graph_ball, hop_distances

__all__ = [
    "ScalarField",
    "DirichletProblem",
    "SolveReport",
    "NonConvergence",
    "laplacian",
    "laplacian_field",
    "ball_problem",
    "solve_dirichlet",
    "max_residual",
    "is_harmonic",
    "harnack_ratio",
    "graph_mvi_ratio",
    "HARMONIC_TOL",
]

HARMONIC_TOL = 1e-9


@dataclass
class ScalarField:
    """Real values per vertex; NaN where the field is undefined."""

    values: np.ndarray
    domain: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    def defined(self) -> np.ndarray:
        return np.isfinite(self.values)

    def ball_average(self, graph: SemiplanarGraph, p: int, R: int) -> float:
        """d_x-weighted average over B_R(p)."""
        ball = graph_ball(graph, p, R)
        m = np.array(ball.members)
        return float(np.dot(self.values[m], graph.degrees[m]) / ball.volume)

    def to_dict(self) -> dict:
        vals = [None if not np.isfinite(v) else float(v) for v in self.values]
        return {"values": vals, "domain": self.domain}

    @classmethod
    def from_dict(cls, data: dict) -> "ScalarField":
        vals = [np.nan if v is None else float(v) for v in data["values"]]
        return cls(np.array(vals), data.get("domain", {}))


def laplacian(graph: SemiplanarGraph, field, v: int) -> float:
    """``(1/d_v) * sum_{y~v} (f(y) - f(v))``."""
    f = field.values if isinstance(field, ScalarField) else np.asarray(field, float)
    nbrs = graph.rotation[v]
    vals = f[list(nbrs)]
    if not np.isfinite(f[v]) or not np.all(np.isfinite(vals)):
        raise ValueError(f"laplacian at {v}: missing value at {v} or a neighbour")
    return float((vals.sum() - len(nbrs) * f[v]) / len(nbrs))


def laplacian_field(graph: SemiplanarGraph, field, where) -> np.ndarray:
    return np.array([laplacian(graph, field, v) for v in where])


@dataclass
class DirichletProblem:
    graph: SemiplanarGraph
    interior: tuple[int, ...]
    boundary_values: dict[int, float]
    tol: float = 1e-12
    max_iter: int = 1_000_000

    def __post_init__(self):
        self.interior = tuple(sorted(int(v) for v in self.interior))
        inside = set(self.interior)
        expected = sorted({w for v in self.interior for w in self.graph.rotation[v]} - inside)
        missing = [b for b in expected if b not in self.boundary_values]
        if missing:
            raise ValueError(f"boundary values missing on {missing[:5]}")
        self.boundary = tuple(expected)
        if not self.boundary:
            raise ValueError("empty boundary: the interior has no outer neighbours")
        for v in self.interior:
            if v in self.graph.boundary:
                raise ValueError(f"interior vertex {v} is a truncation boundary vertex")


@dataclass
class SolveReport:
    iterations: int
    residual: float
    method: str
    converged: bool


class NonConvergence(RuntimeError):
    def __init__(self, report: SolveReport):
        self.report = report
        super().__init__(f"no convergence after {report.iterations} iterations, "
                         f"max |Lf| = {report.residual:.3e}")


def ball_problem(graph: SemiplanarGraph, p: int, R: int, boundary, tol: float = 1e-12,
                 max_iter: int = 1_000_000) -> DirichletProblem:
    """Dirichlet problem on ``B_R(p)`` with values on the sphere of radius R+1.

    ``boundary`` is either a callable of the vertex id or an array over all
    vertices.
    """
    ball = graph_ball(graph, p, R)
    dist = hop_distances(graph, p)
    shell = np.flatnonzero(dist == R + 1)
    if callable(boundary):
        values = {int(b): float(boundary(int(b))) for b in shell}
    else:
        arr = np.asarray(boundary, float)
        values = {int(b): float(arr[b]) for b in shell}
    return DirichletProblem(graph, ball.members, values, tol, max_iter)


def _system(problem: DirichletProblem):
    graph = problem.graph
    idx = {v: i for i, v in enumerate(problem.interior)}
    rows, cols, vals = [], [], []
    rhs = np.zeros(len(idx))
    deg = np.zeros(len(idx))
    for v, i in idx.items():
        nbrs = graph.rotation[v]
        deg[i] = len(nbrs)
        rows.append(i)
        cols.append(i)
        vals.append(float(len(nbrs)))
        for w in nbrs:
            j = idx.get(w)
            if j is None:
                rhs[i] += problem.boundary_values[w]
            else:
                rows.append(i)
                cols.append(j)
                vals.append(-1.0)
    A = sp.csr_matrix((vals, (rows, cols)), shape=(len(idx), len(idx)))
    return A, rhs, deg


def _pcg(A, b, deg, tol, max_iter):
    """Jacobi-preconditioned CG on ``(D - A) f = b``.

    Stops on the max-norm of the normalised residual ``(b - Af)/d``, which
    is exactly max |Lf| over the interior.
    """
    x = b / deg
    r = b - A @ x
    z = r / deg
    p = z.copy()
    rz = r @ z
    it = 0
    res = np.max(np.abs(r / deg), initial=0.0)
    while res > tol and it < max_iter:
        Ap = A @ p
        alpha = rz / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        it += 1
        if it % 50 == 0:
            r = b - A @ x  # limit drift
        res = np.max(np.abs(r / deg), initial=0.0)
        z = r / deg
        rz_new = r @ z
        if rz_new == 0.0:
            break
        p = z + (rz_new / rz) * p
        rz = rz_new
        if it > 4 * len(b) + 100 and res > tol:
            break  # stagnated in floating point
    return x, it


def solve_dirichlet(problem: DirichletProblem) -> tuple[ScalarField, SolveReport]:
    """Harmonic extension of the boundary data into ``problem.interior``.

    The operator ``d_x L`` restricted to the interior is symmetric positive
    definite (self-adjoint for the d_x-weighted inner product), so CG
    applies. If CG stalls above tolerance a sparse direct solve with one
    step of iterative refinement is used instead.
    """
    A, b, deg = _system(problem)
    x, it = _pcg(A, b, deg, problem.tol, problem.max_iter)
    method = "pcg"
    res = np.max(np.abs((b - A @ x) / deg), initial=0.0)
    if res > problem.tol:
        x = spla.spsolve(A.tocsc(), b)
        x += spla.spsolve(A.tocsc(), b - A @ x)
        method = "pcg+direct"
        res = np.max(np.abs((b - A @ x) / deg), initial=0.0)
    values = np.full(problem.graph.vertex_count, np.nan)
    values[list(problem.interior)] = x
    for v, val in problem.boundary_values.items():
        values[v] = val
    field = ScalarField(values, {"kind": "dirichlet", "interior": list(problem.interior),
                                 "boundary": list(problem.boundary)})
    # residual re-measured through the public operator
    res = float(np.max(np.abs(laplacian_field(problem.graph, field, problem.interior)), initial=0.0))
    report = SolveReport(it, res, method, res <= problem.tol)
    if not report.converged:
        raise NonConvergence(report)
    return field, report


def max_residual(graph: SemiplanarGraph, field, where) -> float:
    return float(np.max(np.abs(laplacian_field(graph, field, where)), initial=0.0))


def is_harmonic(graph: SemiplanarGraph, field, where, tol: float = HARMONIC_TOL) -> bool:
    return max_residual(graph, field, where) <= tol


def harnack_ratio(graph: SemiplanarGraph, p: int, R: int, field,
                  harmonic_on=None, tol: float = HARMONIC_TOL) -> float:
    """``max f / min f`` over ``B_R(p)`` for a positive harmonic field.

    Harmonicity is checked on ``harmonic_on`` (default: the ball itself).
    """
    f = field.values if isinstance(field, ScalarField) else np.asarray(field, float)
    ball = graph_ball(graph, p, R)
    m = np.array(ball.members)
    where = ball.members if harmonic_on is None else harmonic_on
    if not np.all(f[m] > 0):
        raise ValueError("field must be strictly positive on the ball")
    res = max_residual(graph, f, where)
    if res > tol:
        raise ValueError(f"field is not harmonic: max |Lf| = {res:.3e}")
    return float(f[m].max() / f[m].min())


def graph_mvi_ratio(graph: SemiplanarGraph, p: int, R: int, field) -> float:
    """``f(p)^2 |B_R| / sum_{B_R} f^2 d_x``; 0 for a field vanishing on the ball."""
    f = field.values if isinstance(field, ScalarField) else np.asarray(field, float)
    ball = graph_ball(graph, p, R)
    m = np.array(ball.members)
    mass = float(np.dot(f[m] ** 2, graph.degrees[m]))
    if mass == 0.0:
        return 0.0
    return float(f[p] ** 2 * ball.volume / mass)
