"""Extension of vertex functions to the polygonal surface.

Per face: interpolate linearly along edges, pull the trace back to the
circumscribed circle through the radial map ``L_n`` (which fixes vertices
and stretches each fan sector onto a disk sector), solve the disk Dirichlet
problem by Fourier series and compose back with ``L_n``.

Coefficients are taken in the arclength-orthonormal basis on the circle of
radius ``r = r_n``::

    1/sqrt(2 pi r),  cos(k eta)/sqrt(pi r),  sin(k eta)/sqrt(pi r)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graph import SemiplanarGraph
from .laplace import ScalarField
from .surface import SurfacePoint, face_geometry, face_quadrature

__all__ = [
    "TRACE_TOL",
    "interpolate_edge",
    "edge_integral_sq",
    "edge_tangent_energy",
    "ln_map",
    "ln_inverse",
    "ln_distortion",
    "boundary_trace",
    "face_fourier",
    "trace_coefficients",
    "FaceFourier",
    "ExtendedField",
    "extend",
    "evaluate",
    "face_energy",
    "face_mass",
    "series_basis",
    "Lemma35Report",
    "lemma35_values",
    "lemma35_check",
]

TRACE_TOL = 1e-6


def _vals(f):
    return f.values if isinstance(f, ScalarField) else np.asarray(f, float)


def interpolate_edge(f, u: int, v: int, t):
    """``(1-t) f(u) + t f(v)``."""
    t = np.asarray(t, float)
    if np.any((t < 0) | (t > 1)):
        raise ValueError("t must lie in [0, 1]")
    f = _vals(f)
    out = (1 - t) * f[u] + t * f[v]
    return float(out) if out.ndim == 0 else out


def edge_integral_sq(f, u: int, v: int) -> float:
    """Closed form of the integral of f1^2 over a unit edge."""
    f = _vals(f)
    a, b = f[u], f[v]
    return float((a * a + a * b + b * b) / 3.0)


def edge_tangent_energy(f, u: int, v: int) -> float:
    """Closed form of the integral of the squared tangential derivative of f1."""
    f = _vals(f)
    return float((f[u] - f[v]) ** 2)


def _sector(n: int, theta):
    alpha = 2 * math.pi / n
    th = np.mod(theta, 2 * math.pi)
    j = np.minimum(np.floor(th / alpha), n - 1)
    return th, j, (2 * j + 1) * alpha / 2


def ln_map(n: int, r, theta, tol: float = 1e-12):
    """Polygon polar coordinates ``(r, theta)`` to disk coordinates ``(rho, eta)``."""
    g = face_geometry(n)
    r = np.asarray(r, float)
    th, j, phi = _sector(n, theta)
    c = np.cos(th - phi) / math.cos(g.sector_angle / 2)
    if np.any(r * c > g.circumradius * (1 + tol)):
        raise ValueError("point outside the polygon")
    rho = r * c
    return (float(rho), float(th)) if rho.ndim == 0 else (rho, th)


def ln_inverse(n: int, rho, eta, tol: float = 1e-12):
    """Disk coordinates ``(rho, eta)`` back to polygon polar coordinates."""
    g = face_geometry(n)
    rho = np.asarray(rho, float)
    if np.any(rho > g.circumradius * (1 + tol)) or np.any(rho < 0):
        raise ValueError("point outside the closed disk")
    th, j, phi = _sector(n, eta)
    r = rho * math.cos(g.sector_angle / 2) / np.cos(th - phi)
    return (float(r), float(th)) if r.ndim == 0 else (r, th)


def ln_distortion(n: int, pairs: int = 1000, seed: int = 0) -> tuple[float, float]:
    """Largest stretch of ``L_n`` and of its inverse on random point pairs."""
    rng = np.random.default_rng(seed)
    g = face_geometry(n)
    rho = g.circumradius * np.sqrt(rng.uniform(0, 1, (2, pairs)))
    eta = rng.uniform(0, 2 * math.pi, (2, pairs))
    r, th = ln_inverse(n, rho.ravel(), eta.ravel())
    r, th = r.reshape(2, pairs), th.reshape(2, pairs)
    disk = np.stack([rho * np.cos(eta), rho * np.sin(eta)], -1)
    poly = np.stack([r * np.cos(th), r * np.sin(th)], -1)
    dd = np.linalg.norm(disk[0] - disk[1], axis=1)
    dp = np.linalg.norm(poly[0] - poly[1], axis=1)
    ok = (dd > 1e-9) & (dp > 1e-9)
    return float(np.max(dd[ok] / dp[ok])), float(np.max(dp[ok] / dd[ok]))


def boundary_trace(n: int, values, eta) -> np.ndarray:
    """``h = f1 o L_n^{-1}`` on the circle, from the n vertex values."""
    values = np.asarray(values, float)
    g = face_geometry(n)
    th, j, phi = _sector(n, eta)
    j = j.astype(int)
    t = np.clip(0.5 + g.apothem * np.tan(th - phi), 0.0, 1.0)
    return (1 - t) * values[j] + t * values[(j + 1) % n]


@dataclass
class FaceFourier:
    face: int
    n: int
    K: int
    a0: float
    a: np.ndarray
    b: np.ndarray
    truncation_bound: float = 0.0

    @property
    def radius(self) -> float:
        return face_geometry(self.n).circumradius

    def series(self, rho, eta) -> np.ndarray:
        """K-term harmonic series at disk points."""
        r = self.radius
        rho = np.atleast_1d(np.asarray(rho, float))
        eta = np.atleast_1d(np.asarray(eta, float))
        k = np.arange(1, self.K + 1)
        s = np.clip(rho / r, 0.0, 1.0)[:, None] ** k
        ke = eta[:, None] * k
        body = (s * (self.a * np.cos(ke) + self.b * np.sin(ke))).sum(axis=1)
        return self.a0 / math.sqrt(2 * math.pi * r) + body / math.sqrt(math.pi * r)

    def to_dict(self) -> dict:
        return {"id": self.face, "a0": float(self.a0),
                "a": [float(x) for x in self.a], "b": [float(x) for x in self.b]}


def face_fourier(n: int, values, K: int = 64, M: int = 4096, face: int = -1) -> FaceFourier:
    """Fourier data of the boundary trace on one face, trapezoid rule with M samples."""
    if K < 1:
        raise ValueError("K must be at least 1")
    if M < 8 * K:
        raise ValueError(f"insufficient sampling: M = {M} < 8K = {8 * K}")
    r = face_geometry(n).circumradius
    eta = 2 * math.pi * np.arange(M) / M
    a0, a, b, tail = trace_coefficients(boundary_trace(n, values, eta), r, K)
    return FaceFourier(face, n, K, a0, a, b, tail)


def trace_coefficients(samples, r: float, K: int):
    """Coefficients of a circle trace sampled at ``2 pi j / M`` (trapezoid rule).

    Returns ``(a0, a, b, tail)`` in the arclength-orthonormal basis on the
    radius-r circle; ``tail`` sums the amplitudes of the discarded modes.
    """
    samples = np.asarray(samples, float)
    M = len(samples)
    if M < 8 * K:
        raise ValueError(f"insufficient sampling: M = {M} < 8K = {8 * K}")
    H = np.fft.rfft(samples)
    a0 = math.sqrt(2 * math.pi * r) / M * H[0].real
    a = 2 * math.sqrt(math.pi * r) / M * H[1:K + 1].real
    b = -2 * math.sqrt(math.pi * r) / M * H[1:K + 1].imag
    tail = np.abs(H[K + 1:M // 2]) * 2 / M
    return float(a0), a, b, float(tail.sum())


@dataclass
class ExtendedField:
    graph: SemiplanarGraph
    field: ScalarField | None
    faces: dict[int, FaceFourier]
    K: int
    M: int

    def to_dict(self) -> dict:
        return {"K": self.K, "M": self.M,
                "faces": [self.faces[i].to_dict() for i in sorted(self.faces)]}

    @classmethod
    def from_dict(cls, graph: SemiplanarGraph, data: dict, field=None) -> "ExtendedField":
        K = int(data["K"])
        faces = {}
        for row in data["faces"]:
            fid = int(row["id"])
            a, b = np.asarray(row["a"], float), np.asarray(row["b"], float)
            if len(a) != K or len(b) != K:
                raise ValueError(f"face {fid}: expected {K} coefficients")
            faces[fid] = FaceFourier(fid, len(graph.faces[fid]), K, float(row["a0"]), a, b)
        return cls(graph, field, faces, K, int(data.get("M", 8 * K)))

    def values_on_rule(self, fid: int, rule) -> np.ndarray:
        """Extension values at the nodes of a face quadrature rule."""
        ff = self.faces[fid]
        return series_basis(rule.n, rule.h, rule.order, ff.K) @ np.r_[ff.a0, ff.a, ff.b]


def extend(graph: SemiplanarGraph, f, K: int = 64, M: int = 4096, faces=None) -> ExtendedField:
    """Extension ``f -> fbar`` on the given faces (default: every face with all values)."""
    if M < 8 * K:
        raise ValueError(f"insufficient sampling: M = {M} < 8K = {8 * K}")
    fv = _vals(f)
    if len(fv) != graph.vertex_count:
        raise ValueError("field length does not match the graph")
    if faces is None:
        faces = [i for i, face in enumerate(graph.faces) if np.all(np.isfinite(fv[list(face)]))]
    table = {}
    for fid in faces:
        face = graph.faces[fid]
        vals = fv[list(face)]
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"field undefined on a vertex of face {fid}")
        table[int(fid)] = face_fourier(len(face), vals, K, M, int(fid))
    sf = f if isinstance(f, ScalarField) else ScalarField(fv)
    return ExtendedField(graph, sf, table, K, M)


def evaluate(ext: ExtendedField, p: SurfacePoint) -> float:
    """``fbar(p)``.

    On the face boundary the value is the interpolated trace itself (the
    Dirichlet solution attains its data there); inside the series is used.
    """
    if p.face not in ext.faces:
        raise ValueError(f"no coefficients stored for face {p.face}")
    ff = ext.faces[p.face]
    if not p.inside(ext.graph, 1e-9):
        raise ValueError("point outside its face")
    rho, eta = ln_map(ff.n, min(p.r, 1e3), p.theta, tol=1e-9)
    if rho >= ff.radius * (1 - 1e-12) and ext.field is not None:
        vals = ext.field.values[list(ext.graph.faces[p.face])]
        return float(boundary_trace(ff.n, vals, np.array([eta]))[0])
    return float(ff.series(rho, eta)[0])


def face_energy(ext: ExtendedField, face: int) -> dict:
    """Closed-form energies of the disk solve on one face.

    ``boundary_tangent`` is the angular form of the integral of h_theta^2;
    ``boundary_tangent_T`` uses the unit tangent ``T = r^{-1} d/dtheta``.
    """
    ff = ext.faces[face]
    r = ff.radius
    k = np.arange(1, ff.K + 1)
    c2 = ff.a ** 2 + ff.b ** 2
    dirichlet = float(np.sum(k * c2) / r)
    tangent = float(np.sum(k * k * c2) / r)
    return {
        "dirichlet_energy": dirichlet,
        "mass": float(r * (ff.a0 ** 2 / 2 + np.sum(c2 / (2 * k + 2)))),
        "boundary_mass": float(ff.a0 ** 2 + c2.sum()),
        "boundary_tangent": tangent,
        "boundary_tangent_T": float(np.sum(k * k * c2) / r ** 2),
        "lemma33": bool(np.sum(k * c2) <= np.sum(k * k * c2)),
    }


def face_mass(ext: ExtendedField, face: int, h: float = 0.05, order: int = 3) -> float:
    """Integral of fbar^2 over the polygon (disk nodes with the L_n Jacobian)."""
    n = ext.faces[face].n
    rule = face_quadrature(n, h, order)
    return float(np.dot(rule.weights, ext.values_on_rule(face, rule) ** 2))


@dataclass(frozen=True)
class Lemma35Report:
    vertex_sum: float
    boundary_integral: float
    face_mass: float
    trace_ratio: float
    mass_ratio: float
    trace_pass: bool


def lemma35_values(n: int, values, K: int = 64, M: int = 4096, h: float = 0.05) -> Lemma35Report:
    """Both ratios of the face control inequality for one n-gon.

    ``trace_ratio = sum f^2 / int f1^2`` is checked against 6.
    ``mass_ratio = int f1^2 / int fbar^2`` is reported as a measured constant.
    """
    values = np.asarray(values, float)
    ff = face_fourier(n, values, K, M)
    nxt = np.roll(values, -1)
    vsum = float(np.sum(values ** 2))
    bint = float(np.sum(values ** 2 + values * nxt + nxt ** 2) / 3.0)
    rule = face_quadrature(n, h, 3)
    g = series_basis(n, h, 3, K) @ np.r_[ff.a0, ff.a, ff.b]
    mass = float(np.dot(rule.weights, g ** 2))
    if mass == 0.0:
        if vsum > 0:
            raise ValueError("zero face mass with nonzero vertex values")
        return Lemma35Report(0.0, 0.0, 0.0, 0.0, 0.0, True)
    return Lemma35Report(vsum, bint, mass, vsum / bint, bint / mass, vsum <= 6 * bint)


@lru_cache(maxsize=32)
def series_basis(n: int, h: float, order: int, K: int) -> np.ndarray:
    """Harmonic basis sampled at the nodes of ``face_quadrature(n, h, order)``."""
    rule = face_quadrature(n, h, order)
    r = face_geometry(n).circumradius
    k = np.arange(1, K + 1)
    s = np.clip(rule.rho / r, 0, 1)[:, None] ** k
    ke = rule.eta[:, None] * k
    return np.hstack([np.full((len(rule.rho), 1), 1 / math.sqrt(2 * math.pi * r)),
                      s * np.cos(ke) / math.sqrt(math.pi * r),
                      s * np.sin(ke) / math.sqrt(math.pi * r)])


def lemma35_check(ext: ExtendedField, face: int, h: float = 0.05) -> Lemma35Report:
    if ext.field is None:
        raise ValueError("vertex values are required")
    vals = ext.field.values[list(ext.graph.faces[face])]
    return lemma35_values(len(vals), vals, ext.K, ext.M, h)
