"""Vertex orderings and mesh relabelling.

An ordering is an int64 array ``perm`` with ``perm[new] = old``.
"""
from __future__ import annotations

import hashlib
from collections import deque

import numpy as np

from .meshcore import Adjacency, Mesh, vertex_qualities
from .rng import SplitMix64

STRATEGIES = ("ori", "random", "bfs", "rdr")


class OrderingError(ValueError):
    pass


def check_permutation(perm, n: int) -> np.ndarray:
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (n,):
        raise OrderingError(f"ordering has length {perm.size}, mesh has {n} vertices")
    seen = np.zeros(n, dtype=bool)
    if n and (perm.min() < 0 or perm.max() >= n):
        raise OrderingError("ordering contains an out-of-range index")
    seen[perm] = True
    if not seen.all():
        raise OrderingError("ordering is not a permutation")
    return perm


def inverse(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm), dtype=perm.dtype)
    return inv


def original_order(mesh: Mesh) -> np.ndarray:
    return np.arange(mesh.n_vertices, dtype=np.int64)


def random_order(n: int, seed: int) -> np.ndarray:
    """Fisher-Yates shuffle of ``0..n-1`` driven by SplitMix64."""
    if n < 0:
        raise ValueError("n must be non-negative")
    perm = list(range(n))
    rng = SplitMix64(seed)
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return np.asarray(perm, dtype=np.int64)


def bfs_order(mesh: Mesh, adjacency: Adjacency, seed_vertex: int = 0) -> np.ndarray:
    """Breadth-first order; restarts from the smallest unvisited vertex."""
    n = adjacency.n_vertices
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if not 0 <= seed_vertex < n:
        raise OrderingError(f"seed vertex {seed_vertex} out of range 0..{n - 1}")
    indptr = adjacency.indptr.tolist()
    indices = adjacency.indices.tolist()
    visited = [False] * n
    out = []
    next_start = 0
    start = seed_vertex
    while True:
        visited[start] = True
        queue = deque([start])
        while queue:
            v = queue.popleft()
            out.append(v)
            for u in indices[indptr[v]:indptr[v + 1]]:
                if not visited[u]:
                    visited[u] = True
                    queue.append(u)
        while next_start < n and visited[next_start]:
            next_start += 1
        if next_start == n:
            break
        start = next_start
    return np.asarray(out, dtype=np.int64)


def rdr_order(mesh: Mesh, adjacency: Adjacency, qualities) -> np.ndarray:
    """Reuse-distance-reducing order.

    Interior vertices are visited worst quality first. From each unprocessed
    one the walk appends its unprocessed neighbours by increasing quality,
    then moves to the worst of them and repeats until it runs out of
    unprocessed neighbours. Ties break on vertex index. Vertices the walk
    never reaches go last in index order.
    """
    n = mesh.n_vertices
    q = np.asarray(qualities, dtype=np.float64)
    if q.shape != (n,):
        raise OrderingError(f"got {q.size} qualities for {n} vertices")
    indptr = adjacency.indptr.tolist()
    indices = adjacency.indices.tolist()
    # rank[v] sorts like (quality, index)
    rank = np.empty(n, dtype=np.int64)
    rank[np.lexsort((np.arange(n), q))] = np.arange(n)
    rank = rank.tolist()

    processed = [False] * n
    placed = [False] * n  # the "sorted" flags
    out = []

    def unprocessed_neighbors(v):
        nb = [u for u in indices[indptr[v]:indptr[v + 1]] if not processed[u]]
        nb.sort(key=rank.__getitem__)
        return nb

    interior = np.flatnonzero(~mesh.boundary)
    for i in sorted(interior.tolist(), key=rank.__getitem__):
        if processed[i]:
            continue
        if not placed[i]:
            out.append(i)
            placed[i] = True
        processed[i] = True
        l = unprocessed_neighbors(i)
        while l:
            for u in l:
                if not placed[u]:
                    out.append(u)
                    placed[u] = True
            head = l[0]
            assert placed[head]
            processed[head] = True
            l = unprocessed_neighbors(head)

    if len(out) < n:
        out.extend(v for v in range(n) if not placed[v])
    assert len(out) == n, "a vertex was appended twice"
    return np.asarray(out, dtype=np.int64)


def compute_ordering(strategy: str, mesh: Mesh, adjacency: Adjacency, *, seed: int = 0,
                     qualities=None, bfs_seed: int = 0) -> np.ndarray:
    if strategy == "ori":
        return original_order(mesh)
    if strategy == "random":
        return random_order(mesh.n_vertices, seed)
    if strategy == "bfs":
        return bfs_order(mesh, adjacency, bfs_seed)
    if strategy == "rdr":
        if qualities is None:
            qualities = vertex_qualities(mesh, adjacency)
        return rdr_order(mesh, adjacency, qualities)
    raise OrderingError(f"unknown ordering strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")


def apply_ordering(mesh: Mesh, perm) -> Mesh:
    """Store vertices in ``perm`` order and remap triangle corners."""
    perm = check_permutation(perm, mesh.n_vertices)
    inv = inverse(perm)
    return Mesh(mesh.xy[perm], inv[mesh.triangles], mesh.boundary[perm])


def write_ordering(perm) -> str:
    perm = np.asarray(perm)
    return f"{len(perm)}\n" + "".join(f"{v}\n" for v in perm.tolist())


def read_ordering(text: str) -> np.ndarray:
    tokens = text.split()
    if not tokens:
        raise OrderingError("empty ordering file")
    n = int(tokens[0])
    if len(tokens) - 1 != n:
        raise OrderingError(f"ordering file declares {n} entries but has {len(tokens) - 1}")
    return check_permutation([int(t) for t in tokens[1:]], n)


def checksum(perm) -> str:
    """Short stable digest of a permutation (printed by the CLI)."""
    return hashlib.sha256(np.asarray(perm, dtype="<i8").tobytes()).hexdigest()[:16]
