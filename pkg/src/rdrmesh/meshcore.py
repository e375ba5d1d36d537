"""Mesh data model, adjacency, boundary detection and edge-length-ratio quality.

Vertices live in a ``(n, 2)`` float64 array, triangles in an ``(m, 3)`` int64
array, both 0-based. Adjacency is stored CSR-style so a vertex's neighbour
list is a contiguous slice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class MeshError(ValueError):
    """Structural problem with a mesh (bad index, degenerate triangle...)."""


class QualityDomainError(ValueError):
    """Quality requested where it is undefined."""


@dataclass(frozen=True, eq=False)
class Mesh:
    """A 2D triangle mesh.

    Attributes
    ----------
    xy : (n, 2) float64 array of vertex coordinates.
    triangles : (m, 3) int64 array of 0-based vertex indices.
    boundary : (n,) bool array; True marks vertices that are never smoothed.
    """

    xy: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray = field(default=None)

    def __post_init__(self):
        xy = np.ascontiguousarray(np.asarray(self.xy, dtype=np.float64).reshape(-1, 2))
        tris = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3))
        n = len(xy)
        if not np.all(np.isfinite(xy)):
            raise MeshError("vertex coordinates must be finite")
        if tris.size:
            if tris.min() < 0 or tris.max() >= n:
                bad = int(np.flatnonzero((tris < 0).any(axis=1) | (tris >= n).any(axis=1))[0])
                raise MeshError(f"triangle {bad} references a vertex outside 0..{n - 1}")
            a, b, c = tris.T
            dup = (a == b) | (b == c) | (a == c)
            if dup.any():
                raise MeshError(f"triangle {int(np.flatnonzero(dup)[0])} repeats a vertex")
        if self.boundary is None:
            boundary = classify_boundary_arrays(n, tris)
        else:
            boundary = np.asarray(self.boundary, dtype=bool).reshape(-1)
            if len(boundary) != n:
                raise MeshError("boundary flag count does not match vertex count")
        xy.setflags(write=False)
        tris.setflags(write=False)
        boundary = boundary.copy()
        boundary.setflags(write=False)
        object.__setattr__(self, "xy", xy)
        object.__setattr__(self, "triangles", tris)
        object.__setattr__(self, "boundary", boundary)

    @property
    def n_vertices(self) -> int:
        return len(self.xy)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def interior(self) -> np.ndarray:
        """Indices of interior vertices in storage order."""
        return np.flatnonzero(~self.boundary)

    def isolated(self) -> np.ndarray:
        """Indices of vertices not referenced by any triangle."""
        used = np.zeros(self.n_vertices, dtype=bool)
        used[self.triangles.ravel()] = True
        return np.flatnonzero(~used)

    def require_no_isolated(self) -> "Mesh":
        iso = self.isolated()
        if len(iso):
            raise MeshError(
                f"mesh has {len(iso)} isolated vertices (first: {int(iso[0])}); "
                "isolated vertices have no defined quality"
            )
        return self

    def with_xy(self, xy: np.ndarray) -> "Mesh":
        return Mesh(xy, self.triangles, self.boundary)

    def same_as(self, other: "Mesh") -> bool:
        """Exact equality of coordinates, connectivity and flags."""
        return (
            np.array_equal(self.xy, other.xy)
            and np.array_equal(self.triangles, other.triangles)
            and np.array_equal(self.boundary, other.boundary)
        )


@dataclass(frozen=True, eq=False)
class Adjacency:
    """Vertex-vertex and vertex-triangle incidence in CSR form.

    ``indices[indptr[i]:indptr[i + 1]]`` are the neighbours of ``i`` in
    ascending order; ``tri_indices[tri_indptr[i]:tri_indptr[i + 1]]`` are the
    triangles attached to ``i``, also ascending.
    """

    indptr: np.ndarray
    indices: np.ndarray
    tri_indptr: np.ndarray
    tri_indices: np.ndarray

    @property
    def n_vertices(self) -> int:
        return len(self.indptr) - 1

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def attached(self, i: int) -> np.ndarray:
        return self.tri_indices[self.tri_indptr[i]:self.tri_indptr[i + 1]]

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    @classmethod
    def from_lists(cls, neighbors, attached=None) -> "Adjacency":
        """Build from explicit per-vertex lists (mainly for graph-only callers)."""
        n = len(neighbors)
        if attached is None:
            attached = [[] for _ in range(n)]
        indptr, indices = _lists_to_csr([sorted(set(x)) for x in neighbors])
        tptr, tind = _lists_to_csr([sorted(x) for x in attached])
        return cls(indptr, indices, tptr, tind)


def _lists_to_csr(lists):
    indptr = np.zeros(len(lists) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(x) for x in lists])
    indices = np.fromiter((v for x in lists for v in x), dtype=np.int64, count=int(indptr[-1]))
    return indptr, indices


def _csr_from_pairs(n: int, rows: np.ndarray, cols: np.ndarray):
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, np.ascontiguousarray(cols, dtype=np.int64)


def build_adjacency(mesh: Mesh) -> Adjacency:
    """Neighbour and attached-triangle lists for every vertex."""
    n = mesh.n_vertices
    t = mesh.triangles
    if t.size == 0:
        empty = np.zeros(n + 1, dtype=np.int64)
        none = np.zeros(0, dtype=np.int64)
        return Adjacency(empty, none, empty.copy(), none.copy())
    a, b, c = t[:, 0], t[:, 1], t[:, 2]
    src = np.concatenate([a, b, b, c, c, a])
    dst = np.concatenate([b, a, c, b, a, c])
    keys = np.unique(src * n + dst)
    indptr, indices = _csr_from_pairs(n, keys // n, keys % n)

    tri_ids = np.repeat(np.arange(len(t), dtype=np.int64), 3)
    tptr, tind = _csr_from_pairs(n, t.ravel(), tri_ids)
    return Adjacency(indptr, indices, tptr, tind)


def classify_boundary_arrays(n: int, triangles: np.ndarray) -> np.ndarray:
    flags = np.zeros(n, dtype=bool)
    if len(triangles) == 0:
        return flags
    t = np.asarray(triangles, dtype=np.int64)
    u = np.concatenate([t[:, 0], t[:, 1], t[:, 2]])
    v = np.concatenate([t[:, 1], t[:, 2], t[:, 0]])
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    keys, counts = np.unique(lo * n + hi, return_counts=True)
    single = keys[counts == 1]
    flags[single // n] = True
    flags[single % n] = True
    return flags


def classify_boundary(mesh: Mesh) -> np.ndarray:
    """Flag vertices lying on an edge that borders exactly one triangle.

    Purely topological; ignores any flags already stored on ``mesh``.
    """
    return classify_boundary_arrays(mesh.n_vertices, mesh.triangles)


def triangle_quality(p, q, r) -> float:
    """Edge-length ratio min(edge) / max(edge) of triangle pqr."""
    e = (
        math.hypot(q[0] - p[0], q[1] - p[1]),
        math.hypot(r[0] - q[0], r[1] - q[1]),
        math.hypot(p[0] - r[0], p[1] - r[1]),
    )
    longest = max(e)
    if longest == 0.0:
        raise QualityDomainError("all three points coincide")
    return min(e) / longest


def triangle_qualities(xy: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Vectorised :func:`triangle_quality` over all triangles."""
    p, q, r = xy[triangles[:, 0]], xy[triangles[:, 1]], xy[triangles[:, 2]]
    e = np.stack(
        [
            np.hypot(*(q - p).T),
            np.hypot(*(r - q).T),
            np.hypot(*(p - r).T),
        ],
        axis=1,
    )
    longest = e.max(axis=1)
    if np.any(longest == 0.0):
        raise QualityDomainError("triangle with all three points coincident")
    return e.min(axis=1) / longest


def vertex_qualities(mesh: Mesh, adjacency: Adjacency, xy: np.ndarray | None = None) -> np.ndarray:
    """Mean attached-triangle quality for every vertex."""
    xy = mesh.xy if xy is None else xy
    counts = np.diff(adjacency.tri_indptr)
    if np.any(counts == 0):
        v = int(np.flatnonzero(counts == 0)[0])
        raise QualityDomainError(f"vertex {v} has no attached triangles")
    tq = triangle_qualities(xy, mesh.triangles)
    per = tq[adjacency.tri_indices]
    sums = np.add.reduceat(per, adjacency.tri_indptr[:-1]) if len(per) else np.zeros(0)
    return sums / counts


def vertex_quality(v: int, mesh: Mesh, adjacency: Adjacency) -> float:
    tris = adjacency.attached(v)
    if len(tris) == 0:
        raise QualityDomainError(f"vertex {v} has no attached triangles")
    xy = mesh.xy
    vals = [triangle_quality(*(xy[k] for k in mesh.triangles[t])) for t in tris]
    return sum(vals) / len(vals)


def global_quality(mesh: Mesh, adjacency: Adjacency, xy: np.ndarray | None = None) -> float:
    """Average vertex quality over all vertices, boundary included.

    Uses an exactly rounded sum so the value does not depend on vertex
    storage order.
    """
    q = vertex_qualities(mesh, adjacency, xy)
    if len(q) == 0:
        raise QualityDomainError("mesh has no vertices")
    return math.fsum(q.tolist()) / len(q)
