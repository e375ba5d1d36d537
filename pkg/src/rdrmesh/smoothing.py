"""Laplacian smoothing driver and the per-iteration access trace."""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .meshcore import Adjacency, Mesh, MeshError, build_adjacency, global_quality

JACOBI = "jacobi"
GAUSS_SEIDEL = "gauss-seidel"
SCHEMES = (JACOBI, GAUSS_SEIDEL)


@dataclass(frozen=True)
class SmoothingConfig:
    goal_quality: float = 1.0
    convergence_epsilon: float = 0.000005
    max_iterations: int = 100
    scheme: str = JACOBI
    thread_count: int = 1

    def __post_init__(self):
        if not 0.0 <= self.goal_quality <= 1.0:
            raise ValueError("goal_quality must lie in [0, 1]")
        if not self.convergence_epsilon > 0:
            raise ValueError("convergence_epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.thread_count < 1:
            raise ValueError("thread_count must be at least 1")
        if self.scheme == GAUSS_SEIDEL and self.thread_count != 1:
            raise ValueError("gauss-seidel is sequential; use thread_count=1")


@dataclass
class SmoothingReport:
    iterations_run: int
    quality_per_iteration: list = field(default_factory=list)
    final_mesh: Mesh | None = None
    stop_reason: str = ""

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations_run,
            "qualities": list(self.quality_per_iteration),
            "stop_reason": self.stop_reason,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def smooth_vertex(v: int, xy: np.ndarray, adjacency: Adjacency) -> np.ndarray:
    """New position of ``v``: the plain mean of its neighbours' positions."""
    nb = adjacency.neighbors(v)
    if len(nb) == 0:
        raise MeshError(f"vertex {v} has no neighbours to average")
    return xy[nb].sum(axis=0) / len(nb)


def _blocks(verts: np.ndarray, k: int):
    k = max(1, min(k, len(verts)))
    return [b for b in np.array_split(verts, k) if len(b)]


class _Sweeper:
    """One smoothing iteration over a fixed interior set."""

    def __init__(self, adjacency: Adjacency, interior: np.ndarray, config: SmoothingConfig):
        self.indptr = np.ascontiguousarray(adjacency.indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(adjacency.indices, dtype=np.int64)
        self.interior = np.ascontiguousarray(interior, dtype=np.int64)
        self.config = config
        self.blocks = _blocks(self.interior, config.thread_count)
        self.pool = ThreadPoolExecutor(len(self.blocks)) if len(self.blocks) > 1 else None

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()

    def __call__(self, xy: np.ndarray) -> np.ndarray:
        if self.config.scheme == GAUSS_SEIDEL:
            _kernels.gauss_seidel_sweep(xy, self.interior, self.indptr, self.indices)
            return xy
        out = xy.copy()
        if self.pool is None:
            _kernels.jacobi_sweep(xy, out, self.interior, self.indptr, self.indices)
        else:
            futures = [
                self.pool.submit(_kernels.jacobi_sweep, xy, out, b, self.indptr, self.indices)
                for b in self.blocks
            ]
            for f in futures:
                f.result()
        return out


def run_smoothing(mesh: Mesh, config: SmoothingConfig | None = None,
                  adjacency: Adjacency | None = None) -> SmoothingReport:
    """Smooth until the goal quality, a stalled improvement, or the iteration cap.

    Each iteration moves every interior vertex once, in storage order, then
    recomputes the global quality. Boundary vertices never move.
    """
    config = config or SmoothingConfig()
    mesh.require_no_isolated()
    adjacency = adjacency or build_adjacency(mesh)
    interior = mesh.interior()
    deg = adjacency.degree()[interior]
    if np.any(deg == 0):
        raise MeshError(f"interior vertex {int(interior[np.flatnonzero(deg == 0)[0]])} has no neighbours")

    xy = np.array(mesh.xy, dtype=np.float64, order="C")
    quality = global_quality(mesh, adjacency, xy)
    qualities = [quality]
    if quality >= config.goal_quality:
        return SmoothingReport(0, qualities, mesh, "goal_reached")

    sweep = _Sweeper(adjacency, interior, config)
    reason = "max_iterations"
    try:
        for _ in range(config.max_iterations):
            xy = sweep(xy)
            new = global_quality(mesh, adjacency, xy)
            qualities.append(new)
            if new >= config.goal_quality:
                reason = "goal_reached"
                break
            if new - quality < config.convergence_epsilon:
                reason = "converged"
                break
            quality = new
    finally:
        sweep.close()
    return SmoothingReport(len(qualities) - 1, qualities, mesh.with_xy(xy), reason)


def trace_iteration(mesh: Mesh, adjacency: Adjacency | None = None) -> np.ndarray:
    """Vertex-record accesses of one smoothing iteration.

    For each interior vertex ``v`` in storage order: ``v``, its neighbours
    in adjacency order, then ``v`` again for the write-back.
    """
    adjacency = adjacency or build_adjacency(mesh)
    interior = mesh.interior()
    if len(interior) == 0:
        return np.zeros(0, dtype=np.int64)
    starts = adjacency.indptr[interior]
    deg = adjacency.indptr[interior + 1] - starts
    seg = deg + 2
    offsets = np.zeros(len(interior), dtype=np.int64)
    np.cumsum(seg[:-1], out=offsets[1:])
    trace = np.empty(int(seg.sum()), dtype=np.int64)
    trace[offsets] = interior
    trace[offsets + seg - 1] = interior
    # neighbour slots: positions offsets+1 .. offsets+deg
    pos = np.arange(int(deg.sum()), dtype=np.int64)
    nstart = np.zeros(len(interior), dtype=np.int64)
    np.cumsum(deg[:-1], out=nstart[1:])
    shift = np.repeat(offsets + 1 - nstart, deg)
    src = np.repeat(starts - nstart, deg) + pos
    trace[pos + shift] = adjacency.indices[src]
    return trace
