"""Semiplanar graphs as rotation systems.

A graph is given by, for every vertex, the counterclockwise cyclic order of
its neighbours. Faces are never supplied; they are traced from the rotation
system. Infinite graphs are handled as finite truncations: vertices whose
face fan is incomplete are flagged as boundary vertices, and for those the
neighbour list is read as a *linear* fan with the missing (exterior) sector
lying between the last and the first entry.

Face tracing convention: the half-edge ``u -> v`` is followed by
``v -> w`` where ``w`` precedes ``u`` in the rotation of ``v``. Faces are
then traversed counterclockwise with the face on the left.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GraphValidationError",
    "InsufficientTruncation",
    "ValidationResult",
    "SemiplanarGraph",
    "GraphBall",
    "validate",
    "vertex_curvature",
    "total_angle",
    "is_nonneg_curvature",
    "graph_distance",
    "hop_distances",
    "graph_ball",
    "from_faces",
    "select_faces",
    "truncate",
    "dual",
]


class GraphValidationError(ValueError):
    """Raised when a rotation system violates a structural invariant."""

    def __init__(self, errors: Sequence[str]):
        self.errors = tuple(errors)
        super().__init__("; ".join(self.errors))


class InsufficientTruncation(ValueError):
    """A query would see the artificial boundary of a finite truncation."""


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    errors: tuple[str, ...]
    faces: tuple[tuple[int, ...], ...] = ()


def _check_rotation(rotation, boundary) -> list[str]:
    errors = []
    n = len(rotation)
    for u, nbrs in enumerate(rotation):
        if len(nbrs) == 0:
            errors.append(f"isolated vertex {u}")
        seen = set()
        for v in nbrs:
            if not 0 <= v < n:
                errors.append(f"vertex {u}: neighbour {v} out of range")
                continue
            if v == u:
                errors.append(f"loop at vertex {u}")
            if v in seen:
                errors.append(f"multi-edge ({u},{v})")
            seen.add(v)
        if u not in boundary and len(nbrs) < 3:
            errors.append(f"interior vertex {u} has degree {len(nbrs)} < 3")
    for u, nbrs in enumerate(rotation):
        for v in nbrs:
            if 0 <= v < n and v != u and u not in rotation[v]:
                errors.append(f"dangling half-edge ({u},{v})")
    for b in boundary:
        if not 0 <= b < n:
            errors.append(f"boundary vertex {b} out of range")
    return errors


def _trace(rotation, boundary):
    """Trace all half-edge cycles.

    Returns (faces, half_edge_face, corner_face, errors) where faces only
    holds genuine faces, ``half_edge_face[(u, v)]`` is the face index of the
    half-edge or -1 on the exterior, and ``corner_face[v][i]`` is the face
    occupying the sector from ``rotation[v][i]`` to ``rotation[v][i+1]``.
    """
    pos = [{w: i for i, w in enumerate(nbrs)} for nbrs in rotation]
    visited: dict[tuple[int, int], int] = {}
    cycles = []
    errors = []
    for u, nbrs in enumerate(rotation):
        for v in nbrs:
            if (u, v) in visited:
                continue
            cid = len(cycles)
            verts, corners = [], []
            gap = False
            a, b = u, v
            while (a, b) not in visited:
                visited[(a, b)] = cid
                verts.append(a)
                i = pos[b][a]
                k = len(rotation[b])
                j = (i - 1) % k
                if b in boundary and i == 0:
                    gap = True
                corners.append((b, j))
                a, b = b, rotation[b][j]
            if (a, b) != (u, v):
                errors.append(f"unclosed face cycle starting at half-edge ({u},{v})")
            cycles.append((verts, corners, gap))

    faces = []
    cycle_to_face = {}
    for cid, (verts, corners, gap) in enumerate(cycles):
        if gap:
            for b, j in corners:
                if not (b in boundary and j == len(rotation[b]) - 1):
                    errors.append(
                        f"vertex {b} touches the exterior but its corner {j} is not the boundary gap"
                    )
            cycle_to_face[cid] = -1
            continue
        if len(verts) < 3:
            errors.append(f"face of degree {len(verts)} < 3 through vertices {verts}")
        m = verts.index(min(verts))
        cycle_to_face[cid] = len(faces)
        faces.append(tuple(verts[m:] + verts[:m]))

    half_edge_face = {he: cycle_to_face[cid] for he, cid in visited.items()}
    corner_face = [[-1] * len(nbrs) for nbrs in rotation]
    for cid, (_, corners, _) in enumerate(cycles):
        for b, j in corners:
            corner_face[b][j] = cycle_to_face[cid]
    return faces, half_edge_face, corner_face, errors


def validate(rotation: Sequence[Sequence[int]], boundary: Iterable[int] = ()) -> ValidationResult:
    """Check a raw rotation system and derive its faces.

    Never raises on malformed input; every violated invariant is listed in
    ``errors``.
    """
    rotation = tuple(tuple(int(v) for v in nbrs) for nbrs in rotation)
    boundary = frozenset(int(b) for b in boundary)
    errors = _check_rotation(rotation, boundary)
    if errors:
        return ValidationResult(False, tuple(errors))
    faces, _, _, terrs = _trace(rotation, boundary)
    if terrs:
        return ValidationResult(False, tuple(terrs))
    return ValidationResult(True, (), tuple(faces))


class SemiplanarGraph:
    """Immutable validated rotation system with derived faces.

    Parameters
    ----------
    rotation : sequence of sequences of int
        Counterclockwise neighbour order per vertex.
    boundary : iterable of int
        Vertices of a finite truncation whose face fan is incomplete.

    Raises
    ------
    GraphValidationError
        If any structural invariant fails.
    """

    def __init__(self, rotation: Sequence[Sequence[int]], boundary: Iterable[int] = ()):
        self.rotation = tuple(tuple(int(v) for v in nbrs) for nbrs in rotation)
        self.boundary = frozenset(int(b) for b in boundary)
        errors = _check_rotation(self.rotation, self.boundary)
        if errors:
            raise GraphValidationError(errors)
        faces, hef, cf, errors = _trace(self.rotation, self.boundary)
        if errors:
            raise GraphValidationError(errors)
        self.faces = tuple(faces)
        self._half_edge_face = hef
        self._corner_face = tuple(tuple(c) for c in cf)
        self._bfs_cache: dict[int, np.ndarray] = {}
        self._boundary_dist = None

    @property
    def vertex_count(self) -> int:
        return len(self.rotation)

    def __len__(self):
        return len(self.rotation)

    def __repr__(self):
        return (f"SemiplanarGraph(V={self.vertex_count}, E={len(self.edges)}, "
                f"F={len(self.faces)}, boundary={len(self.boundary)}, D={self.max_face_degree})")

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(r) for r in self.rotation], dtype=int)

    def is_interior(self, v: int) -> bool:
        return v not in self.boundary

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((u, v) for u, nbrs in enumerate(self.rotation) for v in nbrs if u < v))

    @property
    def face_degrees(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.faces)

    @property
    def max_face_degree(self) -> int:
        return max(self.face_degrees, default=0)

    def face_of_half_edge(self, u: int, v: int) -> int:
        """Face to the left of ``u -> v`` (-1 for the exterior)."""
        return self._half_edge_face[(u, v)]

    def corner_faces(self, v: int) -> tuple[int, ...]:
        """Faces around ``v`` in counterclockwise order (-1 marks the gap)."""
        return self._corner_face[v]

    def faces_at(self, v: int) -> tuple[int, ...]:
        return tuple(f for f in self._corner_face[v] if f >= 0)

    def euler_characteristic(self) -> int | None:
        """V - E + F for boundaryless inputs; None for truncations."""
        if self.boundary:
            return None
        return self.vertex_count - len(self.edges) + len(self.faces)

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertex_count,
            "rotation": [list(r) for r in self.rotation],
            "boundary": sorted(self.boundary),
        }


# curvature

def _require_interior(graph: SemiplanarGraph, v: int):
    if not 0 <= v < graph.vertex_count:
        raise IndexError(f"vertex {v} out of range")
    if v in graph.boundary:
        raise ValueError(f"vertex {v} is a truncation boundary vertex; its face fan is incomplete")


def vertex_curvature(graph: SemiplanarGraph, v: int) -> Fraction:
    """Combinatorial curvature ``1 - d/2 + sum 1/deg(face)`` as an exact rational."""
    _require_interior(graph, v)
    phi = Fraction(1) - Fraction(graph.degree(v), 2)
    for f in graph.corner_faces(v):
        phi += Fraction(1, len(graph.faces[f]))
    return phi


def total_angle(graph: SemiplanarGraph, v: int) -> float:
    """Sum of the interior angles of the regular polygons meeting at ``v``."""
    _require_interior(graph, v)
    return sum((len(graph.faces[f]) - 2) * math.pi / len(graph.faces[f])
               for f in graph.corner_faces(v))


def is_nonneg_curvature(graph: SemiplanarGraph) -> tuple[bool, list[int], list[int]]:
    """Return (ok, offending vertices, skipped boundary vertices)."""
    bad = [v for v in range(graph.vertex_count)
           if v not in graph.boundary and vertex_curvature(graph, v) < 0]
    return not bad, bad, sorted(graph.boundary)


# metric

def hop_distances(graph: SemiplanarGraph, source: int) -> np.ndarray:
    """BFS hop distances from ``source``; -1 for unreachable vertices."""
    cached = graph._bfs_cache.get(source)
    if cached is not None:
        return cached
    dist = np.full(graph.vertex_count, -1, dtype=int)
    dist[source] = 0
    queue = deque([source])
    rot = graph.rotation
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in rot[u]:
            if dist[w] < 0:
                dist[w] = du
                queue.append(w)
    dist.setflags(write=False)
    if len(graph._bfs_cache) > 256:
        graph._bfs_cache.clear()
    graph._bfs_cache[source] = dist
    return dist


def boundary_distance(graph: SemiplanarGraph) -> np.ndarray:
    """Hop distance from each vertex to the nearest boundary vertex (inf if none)."""
    if graph._boundary_dist is None:
        dist = np.full(graph.vertex_count, np.inf)
        queue = deque()
        for b in sorted(graph.boundary):
            dist[b] = 0
            queue.append(b)
        while queue:
            u = queue.popleft()
            for w in graph.rotation[u]:
                if dist[w] == np.inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        dist.setflags(write=False)
        graph._boundary_dist = dist
    return graph._boundary_dist


def graph_distance(graph: SemiplanarGraph, u: int, v: int) -> int:
    d = int(hop_distances(graph, u)[v])
    if d < 0:
        raise ValueError(f"vertices {u} and {v} lie in different components")
    return d


@dataclass(frozen=True)
class GraphBall:
    center: int
    radius: int
    members: tuple[int, ...]
    volume: int
    count: int


def graph_ball(graph: SemiplanarGraph, p: int, R: int) -> GraphBall:
    """Closed hop ball with volume ``sum d_x``.

    Raises InsufficientTruncation if the ball contains a boundary vertex,
    since then neither membership nor degrees are those of the full graph.
    """
    if R < 0:
        raise ValueError("radius must be nonnegative")
    dist = hop_distances(graph, p)
    members = np.flatnonzero((dist >= 0) & (dist <= R))
    touched = [int(m) for m in members if m in graph.boundary]
    if touched:
        raise InsufficientTruncation(
            f"ball B_{R}({p}) reaches truncation boundary vertices {touched[:5]}")
    deg = graph.degrees
    return GraphBall(p, int(R), tuple(int(m) for m in members),
                     int(deg[members].sum()), int(len(members)))


def max_safe_radius(graph: SemiplanarGraph, p: int) -> int:
    """Largest R for which ``graph_ball(graph, p, R)`` is exact."""
    dist = hop_distances(graph, p)
    if not graph.boundary:
        return int(dist.max())
    return int(dist[list(graph.boundary)].min()) - 1


# construction helpers

def from_faces(faces: Sequence[Sequence[int]]) -> tuple[SemiplanarGraph, list[int]]:
    """Assemble a graph from counterclockwise face cycles.

    Vertices are relabelled ``0..n-1`` in increasing order of their original
    ids; the second return value maps new ids to old ones. A vertex whose
    corners do not close up into a full cycle becomes a boundary vertex.
    """
    succ: dict[int, dict[int, int]] = {}
    for face in faces:
        k = len(face)
        for i, v in enumerate(face):
            prev, nxt = face[i - 1], face[(i + 1) % k]
            s = succ.setdefault(v, {})
            if nxt in s:
                raise GraphValidationError([f"corner ({nxt},{v}) claimed by two faces"])
            s[nxt] = prev
    old_ids = sorted(succ)
    new_id = {old: i for i, old in enumerate(old_ids)}
    rotation, boundary = [], []
    for old in old_ids:
        s = succ[old]
        targets = set(s.values())
        nbrs = set(s) | targets
        starts = sorted(w for w in s if w not in targets)
        if len(starts) > 1:
            raise GraphValidationError([f"vertex {old} has a pinched fan ({len(starts)} gaps)"])
        start = starts[0] if starts else min(s)
        order = [start]
        while order[-1] in s and s[order[-1]] != start:
            order.append(s[order[-1]])
        if len(order) != len(nbrs):
            raise GraphValidationError([f"vertex {old} has a disconnected fan"])
        if starts:
            boundary.append(new_id[old])
        rotation.append([new_id[w] for w in order])
    return SemiplanarGraph(rotation, boundary), old_ids


def select_faces(fans: dict[int, Sequence[int | None]], seeds: Iterable[int],
                 rank=None) -> set[int]:
    """Grow a face set until every vertex fan it touches is a single run.

    ``fans[v]`` lists the faces around ``v`` cyclically, ``None`` marking an
    exterior gap that cannot be filled. Holes are filled by adding every
    missing run except one: the run holding a gap, else the run reaching
    farthest out according to ``rank`` (face -> number, larger is farther),
    else the longest.
    """
    chosen = set(seeds)
    changed = True
    while changed:
        changed = False
        for v in sorted(fans):
            fan = fans[v]
            inc = [f is not None and f in chosen for f in fan]
            if not any(inc) or all(inc):
                continue
            k = len(fan)
            start = inc.index(False)
            runs, cur = [], []
            for step in range(k):
                i = (start + step) % k
                if not inc[i]:
                    cur.append(i)
                elif cur:
                    runs.append(cur)
                    cur = []
            if cur:
                runs.append(cur)
            if len(runs) <= 1:
                continue
            keep = next((r for r in runs if any(fan[i] is None for i in r)), None)
            if keep is None:
                if rank is None:
                    keep = max(runs, key=len)
                else:
                    keep = max(runs, key=lambda r: (max(rank(fan[i]) for i in r), len(r)))
            for r in runs:
                if r is keep:
                    continue
                for i in r:
                    if fan[i] is None:
                        continue
                    chosen.add(fan[i])
                    changed = True
    return chosen


def truncate(graph: SemiplanarGraph, center: int, radius: int) -> tuple[SemiplanarGraph, int, list[int]]:
    """Restrict to the faces meeting ``B_radius(center)``.

    Returns (subgraph, new center id, new->old vertex map). Every vertex of
    the hop ball that was interior in ``graph`` stays interior.
    """
    dist = hop_distances(graph, center)
    seeds = [i for i, f in enumerate(graph.faces) if 0 <= min(dist[v] for v in f) <= radius]
    fans = {v: [f if f >= 0 else None for f in graph.corner_faces(v)]
            for v in range(graph.vertex_count)}
    chosen = select_faces(fans, seeds, rank=lambda f: min(dist[v] for v in graph.faces[f]))
    sub, old_ids = from_faces([graph.faces[i] for i in sorted(chosen)])
    # vertices that were boundary in the parent stay boundary
    keep_boundary = set(sub.boundary) | {i for i, old in enumerate(old_ids) if old in graph.boundary}
    if keep_boundary != set(sub.boundary):
        sub = SemiplanarGraph(sub.rotation, keep_boundary)
    return sub, old_ids.index(center), old_ids


def dual(graph: SemiplanarGraph) -> SemiplanarGraph:
    """Face-vertex dual of a boundaryless graph."""
    if graph.boundary:
        raise ValueError("dual is only defined for boundaryless graphs")
    rotation = []
    for face in graph.faces:
        k = len(face)
        rotation.append([graph.face_of_half_edge(face[(i + 1) % k], face[i]) for i in range(k)])
    return SemiplanarGraph(rotation)
