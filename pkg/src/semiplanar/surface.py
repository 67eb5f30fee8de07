"""The regular polygonal surface S(G).

Every face is a regular unit-side polygon. Points are addressed by face id
and polar coordinates about the face barycenter, with the face's first
stored vertex at angle 0 and the rest counterclockwise.

The intrinsic metric is approximated on a visibility mesh: every edge is
cut into ``m = ceil(1/h)`` equal pieces and, since faces are convex, all
pairs of boundary nodes of one face are linked by straight segments. Mesh
paths are genuine surface paths, so mesh distances never undershoot the
true distance; moving a geodesic's edge crossings to the nearest node
costs at most one node spacing per crossing.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .graph import SemiplanarGraph, boundary_distance, graph_distance, vertex_curvature

__all__ = [
    "FaceGeometry",
    "face_geometry",
    "SurfacePoint",
    "NotDevelopable",
    "OutsideSafeRegion",
    "planar_layout",
    "SurfaceMesh",
    "face_quadrature",
    "BallQuadrature",
    "surface_distance",
    "surface_ball_volume",
    "bilipschitz_measure",
    "c3",
]


@dataclass(frozen=True)
class FaceGeometry:
    n: int
    circumradius: float
    apothem: float
    area: float
    sector_angle: float
    diameter: float


@lru_cache(maxsize=None)
def face_geometry(n: int) -> FaceGeometry:
    """Regular n-gon with unit sides."""
    if n < 3:
        raise ValueError("a face needs at least 3 sides")
    r = 1.0 / (2.0 * math.sin(math.pi / n))
    a = r * math.cos(math.pi / n)
    area = n / (4.0 * math.tan(math.pi / n))
    diam = 2 * r if n % 2 == 0 else 2 * r * math.cos(math.pi / (2 * n))
    return FaceGeometry(n, r, a, area, 2 * math.pi / n, diam)


def c3(D: int) -> float:
    """Uniform bound ``2 r_D`` on face diameters for faces of degree <= D."""
    return 2.0 * face_geometry(D).circumradius


def _vertex_xy(n: int) -> np.ndarray:
    r = face_geometry(n).circumradius
    ang = 2 * math.pi * np.arange(n) / n
    return r * np.c_[np.cos(ang), np.sin(ang)]


@dataclass(frozen=True)
class SurfacePoint:
    face: int
    r: float
    theta: float

    def xy(self) -> np.ndarray:
        return np.array([self.r * math.cos(self.theta), self.r * math.sin(self.theta)])

    @classmethod
    def from_xy(cls, face: int, x: float, y: float) -> "SurfacePoint":
        return cls(face, math.hypot(x, y), math.atan2(y, x) % (2 * math.pi))

    @classmethod
    def at_vertex(cls, graph: SemiplanarGraph, v: int, face: int | None = None) -> "SurfacePoint":
        if face is None:
            faces = graph.faces_at(v)
            if not faces:
                raise ValueError(f"vertex {v} lies on no face")
            face = min(faces)
        f = graph.faces[face]
        j = f.index(v)
        n = len(f)
        return cls(face, face_geometry(n).circumradius, 2 * math.pi * j / n)

    def inside(self, graph: SemiplanarGraph, tol: float = 1e-12) -> bool:
        n = len(graph.faces[self.face])
        g = face_geometry(n)
        th = self.theta % (2 * math.pi)
        j = min(int(th // g.sector_angle), n - 1)
        limit = g.apothem / math.cos(th - (2 * j + 1) * g.sector_angle / 2)
        return self.r <= limit + tol


class NotDevelopable(ValueError):
    pass


class OutsideSafeRegion(ValueError):
    pass


def planar_layout(graph: SemiplanarGraph, root: int = 0) -> np.ndarray:
    """Develop a flat graph isometrically into the plane.

    ``root`` goes to the origin and its first neighbour along a shared face
    to ``(1, 0)``. Vertices not reached through faces get NaN.
    """
    for v in range(graph.vertex_count):
        if graph.is_interior(v) and vertex_curvature(graph, v) != 0:
            raise NotDevelopable(
                f"not developable: vertex {v} has curvature {vertex_curvature(graph, v)}")
    coords = np.full((graph.vertex_count, 2), np.nan)
    start = min(graph.faces_at(root))
    face = graph.faces[start]
    i = face.index(root)
    coords[root] = (0.0, 0.0)
    coords[face[(i + 1) % len(face)]] = (1.0, 0.0)
    queue = deque([start])
    done = set()
    while queue:
        fid = queue.popleft()
        if fid in done:
            continue
        face = graph.faces[fid]
        n = len(face)
        placed = [not np.isnan(coords[v, 0]) for v in face]
        k = next((j for j in range(n) if placed[j] and placed[(j + 1) % n]), None)
        if k is None:
            continue
        done.add(fid)
        geo = face_geometry(n)
        A, B = coords[face[k]], coords[face[(k + 1) % n]]
        u = (B - A) / np.linalg.norm(B - A)
        center = (A + B) / 2 + geo.apothem * np.array([-u[1], u[0]])
        start_ang = math.atan2(*(A - center)[::-1])
        for step in range(2, n):
            w = face[(k + step) % n]
            ang = start_ang + step * geo.sector_angle
            nxt = center + geo.circumradius * np.array([math.cos(ang), math.sin(ang)])
            if np.isnan(coords[w, 0]):
                coords[w] = nxt
            elif np.max(np.abs(coords[w] - nxt)) > 1e-6:
                raise NotDevelopable(f"not developable: inconsistent position for vertex {w}")
        for j in range(n):
            g = graph.face_of_half_edge(face[(j + 1) % n], face[j])
            if g >= 0 and g not in done:
                queue.append(g)
    return coords


@dataclass(frozen=True)
class QuadRule:
    """Per-face rule in disk coordinates with polygon weights."""

    n: int
    h: float
    order: int
    rho: np.ndarray
    eta: np.ndarray
    xy: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=64)
def face_quadrature(n: int, h: float, order: int = 3) -> QuadRule:
    """Fan-triangulated rule: one sector per edge, tensor Gauss on cells of size ~2h.

    Nodes live on the circumscribed disk; the polygon area element is
    ``rho drho deta / c(eta)^2`` with ``c = cos(eta - phi_j)/cos(alpha/2)``,
    the exact Jacobian of the inverse polar map.
    """
    g = face_geometry(n)
    r, alpha = g.circumradius, g.sector_angle
    x, w = np.polynomial.legendre.leggauss(order)
    m_rho = max(1, math.ceil(r / (2 * h)))
    m_eta = max(1, math.ceil(alpha * r / (2 * h)))
    rb = np.linspace(0.0, r, m_rho + 1)
    rho = ((rb[:-1, None] + rb[1:, None]) / 2 + (rb[1:, None] - rb[:-1, None]) / 2 * x).ravel()
    wr = ((rb[1:, None] - rb[:-1, None]) / 2 * w).ravel()
    eb = np.linspace(0.0, alpha, m_eta + 1)
    et = ((eb[:-1, None] + eb[1:, None]) / 2 + (eb[1:, None] - eb[:-1, None]) / 2 * x).ravel()
    we = ((eb[1:, None] - eb[:-1, None]) / 2 * w).ravel()
    R_, E_ = np.meshgrid(rho, et, indexing="ij")
    W_ = np.outer(wr * rho, we)
    c = np.cos(E_ - alpha / 2) / math.cos(alpha / 2)
    W_ = W_ / c ** 2
    rr = R_ / c
    all_eta = np.concatenate([E_.ravel() + j * alpha for j in range(n)])
    all_rho = np.tile(R_.ravel(), n)
    all_w = np.tile(W_.ravel(), n)
    all_r = np.tile(rr.ravel(), n)
    xy = np.c_[all_r * np.cos(all_eta), all_r * np.sin(all_eta)]
    return QuadRule(n, h, order, all_rho, all_eta, xy, all_w)


class SurfaceMesh:
    """Visibility mesh realising the intrinsic metric of S(G).

    Parameters
    ----------
    graph : SemiplanarGraph
    h : float
        Target node spacing along edges.
    """

    def __init__(self, graph: SemiplanarGraph, h: float = 0.05):
        if h <= 0:
            raise ValueError("h must be positive")
        self.graph = graph
        self.h = h
        self.m = m = max(1, math.ceil(1.0 / h - 1e-12))
        self.spacing = 1.0 / m
        V = graph.vertex_count
        edges = graph.edges
        self.edge_index = {e: i for i, e in enumerate(edges)}
        self.n_nodes = V + len(edges) * (m - 1)
        self.face_nodes = []
        self.face_xy = []
        src, dst, wts = [], [], []
        for face in graph.faces:
            n = len(face)
            vxy = _vertex_xy(n)
            ids, xy, lab1, lab2 = [], [], [], []
            for j in range(n):
                a, b = face[j], face[(j + 1) % n]
                ids.append(a)
                xy.append(vxy[j])
                lab1.append(j)
                lab2.append((j - 1) % n)
                sub = self._edge_nodes(a, b)
                t = np.arange(1, m) / m
                ids.extend(sub)
                xy.extend(vxy[j] + t[:, None] * (vxy[(j + 1) % n] - vxy[j]))
                lab1.extend([j] * (m - 1))
                lab2.extend([j] * (m - 1))
            ids = np.array(ids)
            xy = np.array(xy)
            lab1, lab2 = np.array(lab1), np.array(lab2)
            self.face_nodes.append(ids)
            self.face_xy.append(xy)
            ia, ib = np.triu_indices(len(ids), 1)
            same = ((lab1[ia] == lab1[ib]) | (lab1[ia] == lab2[ib])
                    | (lab2[ia] == lab1[ib]) | (lab2[ia] == lab2[ib]))
            ia, ib = ia[~same], ib[~same]
            src.append(ids[ia])
            dst.append(ids[ib])
            wts.append(np.linalg.norm(xy[ia] - xy[ib], axis=1))
        for (a, b) in edges:
            chain = [a, *self._edge_nodes(a, b), b]
            src.append(np.array(chain[:-1]))
            dst.append(np.array(chain[1:]))
            wts.append(np.full(m, self.spacing))
        src, dst, wts = np.concatenate(src), np.concatenate(dst), np.concatenate(wts)
        lo, hi = np.minimum(src, dst), np.maximum(src, dst)
        key = lo.astype(np.int64) * self.n_nodes + hi
        order = np.lexsort((wts, key))
        key, wts = key[order], wts[order]
        first = np.r_[True, key[1:] != key[:-1]]
        key, wts = key[first], wts[first]
        self._lo = (key // self.n_nodes).astype(np.int64)
        self._hi = (key % self.n_nodes).astype(np.int64)
        self._w = wts
        self._base = sp.csr_matrix((self._w, (self._lo, self._hi)), shape=(self.n_nodes,) * 2)
        self._cache: dict = {}
        bd = boundary_distance(graph)
        self.safe_face = np.array([min(bd[v] for v in f) >= 2 for f in graph.faces], dtype=bool)

    def _edge_nodes(self, a: int, b: int) -> list[int]:
        """Interior subdivision nodes of edge ab, ordered from a to b."""
        m = self.m
        lo, hi = (a, b) if a < b else (b, a)
        base = self.graph.vertex_count + self.edge_index[(lo, hi)] * (m - 1)
        nodes = list(range(base, base + m - 1))
        return nodes if a < b else nodes[::-1]

    def _as_point(self, p) -> SurfacePoint:
        if isinstance(p, SurfacePoint):
            return p
        return SurfacePoint.at_vertex(self.graph, int(p))

    def _vertex_of(self, p: SurfacePoint) -> int | None:
        n = len(self.graph.faces[p.face])
        g = face_geometry(n)
        j = p.theta / g.sector_angle
        if abs(p.r - g.circumradius) < 1e-12 and abs(j - round(j)) < 1e-12:
            return self.graph.faces[p.face][int(round(j)) % n]
        return None

    def node_distances(self, p, return_predecessors: bool = False):
        """Mesh distance from ``p`` (vertex id or SurfacePoint) to every node."""
        if isinstance(p, SurfacePoint):
            v = self._vertex_of(p)
            p = p if v is None else v
        key = (p, return_predecessors)
        if key in self._cache:
            return self._cache[key]
        N = self.n_nodes
        if isinstance(p, SurfacePoint):
            ids = self.face_nodes[p.face]
            d0 = np.maximum(np.linalg.norm(self.face_xy[p.face] - p.xy(), axis=1), 1e-300)
            extra = sp.csr_matrix((d0, (ids, np.full(len(ids), N))), shape=(N + 1, N + 1))
            A = sp.bmat([[self._base, None], [None, sp.csr_matrix((1, 1))]]).tocsr() + extra
            out = dijkstra(A, directed=False, indices=N, return_predecessors=return_predecessors)
            if return_predecessors:
                dist, pred = out
                out = (np.where(dist < 1e-200, 0.0, dist)[:N], pred[:N])
            else:
                out = np.where(out < 1e-200, 0.0, out)[:N]
        else:
            out = dijkstra(self._base, directed=False, indices=int(p),
                           return_predecessors=return_predecessors)
        if len(self._cache) > 32:
            self._cache.clear()
        self._cache[key] = out
        return out

    def vertex_distances(self, sources) -> np.ndarray:
        """Rows of vertex-to-vertex mesh distances for a batch of vertex sources."""
        d = dijkstra(self._base, directed=False, indices=list(sources))
        return d[:, :self.graph.vertex_count]

    def distances_in_face(self, p, face: int, xy: np.ndarray, dnode=None) -> np.ndarray:
        """Distances from ``p`` to local points ``xy`` of ``face``."""
        p = self._as_point(p)
        if dnode is None:
            dnode = self.node_distances(p)
        bxy = self.face_xy[face]
        db = dnode[self.face_nodes[face]]
        xy = np.atleast_2d(xy)
        out = np.empty(len(xy))
        step = max(1, 200_000 // max(1, len(bxy)))
        for s in range(0, len(xy), step):
            chunk = xy[s:s + step]
            out[s:s + step] = np.min(
                db[None, :] + np.linalg.norm(chunk[:, None, :] - bxy[None, :, :], axis=2), axis=1)
        if face == p.face:
            out = np.minimum(out, np.linalg.norm(xy - p.xy(), axis=1))
        return out

    def distance(self, p, q) -> tuple[float, float]:
        """Mesh distance and a crossing-count bound on its overshoot."""
        p, q = self._as_point(p), self._as_point(q)
        dnode, pred = self.node_distances(p, return_predecessors=True)
        bxy = self.face_xy[q.face]
        ids = self.face_nodes[q.face]
        cand = dnode[ids] + np.linalg.norm(bxy - q.xy(), axis=1)
        k = int(np.argmin(cand))
        value = float(cand[k])
        if q.face == p.face:
            direct = float(np.linalg.norm(q.xy() - p.xy()))
            if direct <= value:
                return direct, 0.0
        path = [int(ids[k])]
        while 0 <= path[-1] < self.n_nodes and dnode[path[-1]] > 0:
            path.append(int(pred[path[-1]]))
        across = sum(not self._on_common_edge(a, b) for a, b in zip(path, path[1:]))
        return value, across * self.spacing

    def _edges_of_node(self, x: int) -> set:
        V = self.graph.vertex_count
        if x < V:
            return {self.edge_index[(min(x, w), max(x, w))] for w in self.graph.rotation[x]}
        return {(x - V) // (self.m - 1)}

    def _on_common_edge(self, a: int, b: int) -> bool:
        if not (0 <= a < self.n_nodes and 0 <= b < self.n_nodes):
            return False
        return bool(self._edges_of_node(a) & self._edges_of_node(b))

    def vertex_distance(self, u: int, v: int) -> float:
        return float(self.node_distances(u)[v])


class BallQuadrature:
    """Smoothed-indicator quadrature over ``B_R(p)``.

    The indicator of ``{d <= R}`` is replaced by a linear ramp of width h;
    ``eps_quad`` is the quadrature mass inside that ramp band.
    """

    def __init__(self, mesh: SurfaceMesh, p, R: float, order: int = 3):
        self.mesh = mesh
        self.p = p = mesh._as_point(p)
        self.R = R
        h = mesh.h
        graph = mesh.graph
        dnode = mesh.node_distances(p)
        self.faces, self.rules, self.weights = [], [], []
        band = 0.0
        if R <= 0:
            self.volume, self.eps_quad = 0.0, 0.0
            return
        for fid, face in enumerate(graph.faces):
            db = dnode[mesh.face_nodes[fid]]
            lb = db.min() if fid != p.face else 0.0
            if lb > R + h:
                continue
            n = len(face)
            rule = face_quadrature(n, h, order)
            if fid != p.face and lb + face_geometry(n).diameter < R - h:
                chi = np.ones_like(rule.weights)
            else:
                d = mesh.distances_in_face(p, fid, rule.xy, dnode)
                chi = np.clip((R - d) / h + 0.5, 0.0, 1.0)
                band += float(rule.weights[(chi > 0) & (chi < 1)].sum())
            if not np.any(chi > 0):
                continue
            if not mesh.safe_face[fid]:
                raise OutsideSafeRegion(
                    f"ball of radius {R} reaches face {fid} next to the truncation boundary")
            self.faces.append(fid)
            self.rules.append(rule)
            self.weights.append(rule.weights * chi)
        self.volume = float(sum(w.sum() for w in self.weights))
        self.eps_quad = band

    def integrate(self, values_per_face) -> float:
        """Sum of weights times ``values_per_face(fid, rule)`` over the ball."""
        total = 0.0
        for fid, rule, w in zip(self.faces, self.rules, self.weights):
            total += float(np.dot(w, values_per_face(fid, rule)))
        return total


def surface_distance(mesh: SurfaceMesh, p, q) -> tuple[float, float]:
    """Intrinsic distance (mesh overestimate) and its error bound."""
    for pt in (mesh._as_point(p), mesh._as_point(q)):
        if not mesh.safe_face[pt.face]:
            raise OutsideSafeRegion(f"point on face {pt.face} is outside the safe region")
    return mesh.distance(p, q)


def surface_ball_volume(mesh: SurfaceMesh, p, R: float, order: int = 3) -> tuple[float, float]:
    """Area of ``B_R(p)`` and the ramp-band mass ``eps_quad``."""
    if R == 0:
        return 0.0, 0.0
    bq = BallQuadrature(mesh, p, R, order)
    return bq.volume, bq.eps_quad


def bilipschitz_measure(mesh: SurfaceMesh, pairs) -> dict:
    """Extremes of ``d(x,y) / d^G(x,y)`` over vertex pairs."""
    pairs = [(int(u), int(v)) for u, v in pairs if u != v]
    sources = sorted({u for u, _ in pairs})
    rows = dict(zip(sources, mesh.vertex_distances(sources)))
    ratios = np.array([rows[u][v] / graph_distance(mesh.graph, u, v) for u, v in pairs])
    return {"min": float(ratios.min()), "max": float(ratios.max()),
            "count": int(len(ratios)), "ratios": ratios}
