"""Finite balls of Euclidean tilings, closed polyhedra, and graph files.

Tilings are built in exact planar coordinates from a translation lattice and
a few regular polygons per cell. Only the combinatorics survives in the
returned graph; the coordinates are kept as a calibration oracle.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from .graph import SemiplanarGraph, dual, from_faces, select_faces

__all__ = [
    "PATTERNS",
    "TilingSpec",
    "GeneratedTiling",
    "normalize_kind",
    "generate",
    "polyhedron",
    "fan_patch",
    "vertex_pattern",
    "load",
    "save",
    "GraphFileError",
]

_SQ3 = math.sqrt(3.0)

# kind -> (lattice vectors, [(offset, n, rotation of vertex 0)], vertex pattern)
_TILINGS = {
    "3^6": (((1.0, 0.0), (0.5, _SQ3 / 2)), [((0.0, 0.0), 1, 0.0)], (3, 3, 3, 3, 3, 3)),
    "4^4": (((1.0, 0.0), (0.0, 1.0)), [((0.0, 0.0), 1, 0.0)], (4, 4, 4, 4)),
    "6^3": (((_SQ3, 0.0), (_SQ3 / 2, 1.5)), [((0.0, 0.0), 6, math.pi / 6)], (6, 6, 6)),
    "3.6.3.6": (((2.0, 0.0), (1.0, _SQ3)), [((0.0, 0.0), 6, 0.0)], (3, 6, 3, 6)),
    "3.3.4.3.4": None,  # filled below
    "4.8.8": None,
    "3.12.12": None,
    "4.6.12": None,
}

_s = math.sqrt(2 + _SQ3)
_TILINGS["3.3.4.3.4"] = (
    ((_s, 0.0), (0.0, _s)),
    [((0.0, 0.0), 4, math.pi / 4 + math.pi / 12), ((_s / 2, _s / 2), 4, math.pi / 4 - math.pi / 12)],
    (3, 3, 4, 3, 4),
)
_s = 1 + math.sqrt(2)
_TILINGS["4.8.8"] = (((_s, 0.0), (0.0, _s)), [((0.0, 0.0), 8, math.pi / 8)], (4, 8, 8))
_s = 2 + _SQ3
_TILINGS["3.12.12"] = (((_s, 0.0), (_s / 2, _s * _SQ3 / 2)), [((0.0, 0.0), 12, math.pi / 12)], (3, 12, 12))
_s = 3 + _SQ3
_TILINGS["4.6.12"] = (((_s, 0.0), (_s / 2, _s * _SQ3 / 2)), [((0.0, 0.0), 12, math.pi / 12)], (4, 6, 12))
del _s

PATTERNS = {kind: spec[2] for kind, spec in _TILINGS.items()}

_ALIASES = {
    "3.3.3.3.3.3": "3^6", "3.6": "3^6", "triangular": "3^6",
    "4.4.4.4": "4^4", "4.4": "4^4", "square": "4^4",
    "6.6.6": "6^3", "6.3": "6^3", "hexagonal": "6^3",
    "3.4.3.4.3": "3.3.4.3.4", "3.4.3.3.4": "3.3.4.3.4", "3.3.4.3.4": "3.3.4.3.4",
    "3.6.3.6": "3.6.3.6", "6.3.6.3": "3.6.3.6",
    "8.8.4": "4.8.8", "12.12.3": "3.12.12", "4.12.6": "4.6.12",
}


def normalize_kind(kind: str) -> str:
    k = kind.strip().replace("(", "").replace(")", "").replace(",", ".")
    if k in _TILINGS:
        return k
    if k in _ALIASES:
        return _ALIASES[k]
    raise ValueError(f"unsupported tiling pattern {kind!r}; choose one of {sorted(_TILINGS)}")


@dataclass(frozen=True)
class TilingSpec:
    kind: str
    radius: int

    def __post_init__(self):
        object.__setattr__(self, "kind", normalize_kind(self.kind))
        if self.radius < 1:
            raise ValueError("radius must be >= 1")


@dataclass
class GeneratedTiling:
    spec: TilingSpec
    graph: SemiplanarGraph
    center: int
    coords: np.ndarray = field(repr=False)


def _lattice_points(kind: str, extent: float) -> np.ndarray:
    (a1, a2), polys, _ = _TILINGS[kind]
    a1, a2 = np.asarray(a1), np.asarray(a2)
    # lattice steps needed along each basis vector to cover the disk
    area = abs(a1[0] * a2[1] - a1[1] * a2[0])
    span = int(math.ceil(extent * max(np.linalg.norm(a1), np.linalg.norm(a2)) / area)) + 2
    ij = np.array([(i, j) for i in range(-span, span + 1) for j in range(-span, span + 1)], dtype=float)
    origins = ij @ np.vstack([a1, a2])
    pts = []
    for offset, n, rot in polys:
        if n == 1:
            local = np.zeros((1, 2))
        else:
            r = 1.0 / (2 * math.sin(math.pi / n))
            ang = rot + 2 * math.pi * np.arange(n) / n
            local = r * np.c_[np.cos(ang), np.sin(ang)]
        pts.append((origins + offset)[:, None, :] + local[None, :, :])
    P = np.concatenate([p.reshape(-1, 2) for p in pts])
    P = P[np.linalg.norm(P, axis=1) <= extent]
    # exact tilings: coincident copies agree to rounding only
    keys = np.round(P * 1e6).astype(np.int64)
    _, idx = np.unique(keys, axis=0, return_index=True)
    P = P[np.sort(idx)]
    order = np.lexsort((P[:, 0], P[:, 1]))
    return P[order]


def _planar_faces(P: np.ndarray):
    """Unit-edge graph on ``P`` and its bounded regular faces."""
    tree = cKDTree(P)
    pairs = tree.query_pairs(1 + 1e-6, output_type="ndarray")
    d = np.linalg.norm(P[pairs[:, 0]] - P[pairs[:, 1]], axis=1)
    pairs = pairs[d > 1 - 1e-6]
    nbrs = [[] for _ in range(len(P))]
    for a, b in pairs:
        nbrs[a].append(b)
        nbrs[b].append(a)
    rotation = []
    for v, ns in enumerate(nbrs):
        ang = [math.atan2(P[w, 1] - P[v, 1], P[w, 0] - P[v, 0]) for w in ns]
        rotation.append([ns[i] for i in np.argsort(ang, kind="stable")])
    pos = [{w: i for i, w in enumerate(r)} for r in rotation]
    seen = set()
    faces = []
    corner_of = {}
    for u in range(len(P)):
        for v in rotation[u]:
            if (u, v) in seen:
                continue
            cyc, corners = [], []
            a, b = u, v
            while (a, b) not in seen:
                seen.add((a, b))
                cyc.append(a)
                j = (pos[b][a] - 1) % len(rotation[b])
                corners.append((b, j))
                a, b = b, rotation[b][j]
            n = len(cyc)
            xy = P[cyc]
            area = 0.5 * np.sum(xy[:, 0] * np.roll(xy[:, 1], -1) - np.roll(xy[:, 0], -1) * xy[:, 1])
            if 3 <= n <= 12 and abs(area - n / (4 * math.tan(math.pi / n))) < 1e-6:
                fid = len(faces)
                faces.append(tuple(cyc))
                for c in corners:
                    corner_of[c] = fid
    fans = {v: [corner_of.get((v, j)) for j in range(len(rotation[v]))] for v in range(len(P))}
    return faces, fans


def vertex_pattern(graph: SemiplanarGraph, v: int) -> tuple[int, ...]:
    """Cyclic face-degree sequence at ``v`` in canonical (min rotation/reflection) form."""
    seq = [len(graph.faces[f]) for f in graph.corner_faces(v)]
    return _canonical(seq)


def _canonical(seq) -> tuple[int, ...]:
    seq = list(seq)
    k = len(seq)
    variants = [tuple(s[i:] + s[:i]) for s in (seq, seq[::-1]) for i in range(k)]
    return min(variants)


def generate(spec: TilingSpec | str, radius: int | None = None) -> GeneratedTiling:
    """Finite truncation of a Euclidean tiling holding ``B_radius`` with full fans.

    Parameters
    ----------
    spec : TilingSpec or str
        Pattern, e.g. ``"4.8.8"`` or ``"4^4"``.
    radius : int, optional
        Hop radius, required when ``spec`` is a string.
    """
    if not isinstance(spec, TilingSpec):
        spec = TilingSpec(spec, radius)
    extent = spec.radius + 10.0
    P = _lattice_points(spec.kind, extent)
    faces, fans = _planar_faces(P)
    c0 = int(np.argmin(np.linalg.norm(P - np.array([1e-7, 2e-7]), axis=1)))
    # hop metric of the raw patch (its clipped rim may have pinched fans,
    # so distances come from a BFS over face edges rather than a graph)
    adj = [set() for _ in range(len(P))]
    for f in faces:
        for a, b in zip(f, f[1:] + f[:1]):
            adj[a].add(b)
            adj[b].add(a)
    hop = np.full(len(P), -1)
    hop[c0] = 0
    queue = deque([c0])
    while queue:
        a = queue.popleft()
        for b in adj[a]:
            if hop[b] < 0:
                hop[b] = hop[a] + 1
                queue.append(b)
    seeds = [i for i, f in enumerate(faces) if 0 <= min(hop[v] for v in f) <= spec.radius]
    centroid = np.array([np.linalg.norm(P[list(f)].mean(axis=0) - P[c0]) for f in faces])
    chosen = select_faces(fans, seeds, rank=lambda f: centroid[f])
    graph, keep = from_faces([faces[i] for i in sorted(chosen)])
    coords = P[keep]
    center = keep.index(c0)
    return GeneratedTiling(spec, graph, center, coords)


def fan_patch(pattern) -> tuple[SemiplanarGraph, int]:
    """Single vertex surrounded by the given cyclic sequence of polygons.

    Useful for curvature checks at vertices that do not occur in flat tilings,
    e.g. ``fan_patch((3,) * 7)`` has curvature -1/6 at its center.
    """
    faces = []
    k = len(pattern)
    nxt = k + 1
    spokes = list(range(1, k + 1))
    for i, n in enumerate(pattern):
        a, b = spokes[i], spokes[(i + 1) % k]
        extra = list(range(nxt, nxt + n - 3))
        nxt += n - 3
        faces.append((0, a, *extra, b))
    graph, old = from_faces(faces)
    return graph, old.index(0)


def polyhedron(kind: str) -> SemiplanarGraph:
    """Closed polyhedral graph: ``tetrahedron``, ``cube``, ``octahedron``,
    ``icosahedron`` or ``dodecahedron``."""
    if kind == "dodecahedron":
        return dual(polyhedron("icosahedron"))
    if kind == "cube":
        return dual(polyhedron("octahedron"))
    if kind == "tetrahedron":
        pts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], float)
    elif kind == "octahedron":
        pts = np.vstack([np.eye(3), -np.eye(3)])
    elif kind == "icosahedron":
        g = (1 + math.sqrt(5)) / 2
        pts = []
        for a in (-1, 1):
            for b in (-g, g):
                pts += [(0, a, b), (a, b, 0), (b, 0, a)]
        pts = np.array(pts, float)
    else:
        raise ValueError(f"unknown polyhedron {kind!r}")
    hull = ConvexHull(pts)
    faces = []
    for simplex in hull.simplices:
        a, b, c = pts[simplex]
        if np.dot(np.cross(b - a, c - a), a + b + c) < 0:
            simplex = simplex[::-1]
        faces.append(tuple(int(s) for s in simplex))
    graph, _ = from_faces(faces)
    return graph


# graph files

class GraphFileError(ValueError):
    """Malformed graph file; message names the offending field."""


def save(graph: SemiplanarGraph, path, config: dict | None = None) -> None:
    """Write compact JSON; ``config`` is echoed under its own key when given."""
    data = graph.to_dict()
    if config is not None:
        data["config"] = config
    Path(path).write_text(json.dumps(data, indent=None, separators=(",", ":")) + "\n")


def loads(text: str) -> SemiplanarGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFileError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise GraphFileError("top level must be an object")
    for key in ("vertices", "rotation"):
        if key not in data:
            raise GraphFileError(f"missing field {key!r}")
    n = data["vertices"]
    if not isinstance(n, int) or n < 0:
        raise GraphFileError("field 'vertices' must be a nonnegative integer")
    rot = data["rotation"]
    if not isinstance(rot, list) or len(rot) != n:
        raise GraphFileError(f"field 'rotation' must be a list of {n} neighbour lists")
    for v, entry in enumerate(rot):
        if not isinstance(entry, list) or not all(isinstance(w, int) and not isinstance(w, bool) for w in entry):
            raise GraphFileError(f"rotation entry for vertex {v} must be a list of integer ids")
    boundary = data.get("boundary", [])
    if not isinstance(boundary, list) or not all(isinstance(b, int) for b in boundary):
        raise GraphFileError("field 'boundary' must be a list of integer ids")
    return SemiplanarGraph(rot, boundary)


def load(path) -> SemiplanarGraph:
    """Read a graph file. Faces are always re-derived from the rotation system."""
    return loads(Path(path).read_text())
