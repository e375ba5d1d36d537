"""Exact LRU reuse distances and the statistics built on them.

A reuse distance is the number of distinct elements touched between two
consecutive accesses to the same element. First accesses are cold and are
stored as ``COLD`` (-1); every statistic here ignores them.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

COLD = -1


@dataclass(frozen=True, eq=False)
class ReuseProfile:
    distances: np.ndarray

    @property
    def n_accesses(self) -> int:
        return len(self.distances)

    @property
    def n_cold(self) -> int:
        return int(np.count_nonzero(self.distances == COLD))

    @property
    def finite(self) -> np.ndarray:
        return self.distances[self.distances != COLD]

    @property
    def finite_distances_sorted(self) -> np.ndarray:
        try:
            return self._sorted
        except AttributeError:
            s = np.sort(self.finite)
            s.setflags(write=False)
            object.__setattr__(self, "_sorted", s)
            return s

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["position", "distance"])
        w.writerows(enumerate(self.distances.tolist()))
        return buf.getvalue()


def _profile(d) -> ReuseProfile:
    d = np.asarray(d, dtype=np.int64)
    d.setflags(write=False)
    return ReuseProfile(d)


def reuse_distances(trace, kernels=None) -> ReuseProfile:
    """O(N log N) scan: ids are compacted, then a Fenwick tree over access
    times counts the distinct elements last touched inside each window."""
    kernels = kernels or _kernels.active
    trace = np.asarray(trace, dtype=np.int64).ravel()
    if trace.size and trace.min() < 0:
        raise ValueError("trace identifiers must be non-negative")
    uniq, dense = np.unique(trace, return_inverse=True)
    return _profile(kernels.reuse_distances(dense.astype(np.int64), len(uniq)))


def reuse_distances_oracle(trace) -> ReuseProfile:
    """Quadratic reference: count the distinct ids strictly between occurrences."""
    seq = [int(x) for x in np.asarray(trace).ravel()]
    last = {}
    out = []
    for t, e in enumerate(seq):
        p = last.get(e)
        out.append(COLD if p is None else len(set(seq[p + 1:t])))
        last[e] = t
    return _profile(out)


def quantile(profile: ReuseProfile, q: float) -> int:
    """Smallest finite distance d with at least a fraction q of the finite
    distances <= d. ``q * n`` is rounded to 9 decimals first so that e.g.
    0.9 of 10 means 9 elements, not 10."""
    if not 0.0 < q <= 1.0:
        raise ValueError("q must lie in (0, 1]")
    s = profile.finite_distances_sorted
    if len(s) == 0:
        raise ValueError("profile has no finite distances")
    k = max(1, math.ceil(round(q * len(s), 9)))
    return int(s[k - 1])


def mean_distance(profile: ReuseProfile) -> float:
    f = profile.finite
    if len(f) == 0:
        raise ValueError("profile has no finite distances")
    return float(f.mean())


def window_bounds(n: int, window_count: int) -> list[tuple[int, int]]:
    """Equal windows of ``n // window_count``; the last takes the remainder."""
    if window_count < 1:
        raise ValueError("window_count must be positive")
    if n < window_count:
        raise ValueError(f"{n} accesses cannot fill {window_count} windows")
    size = n // window_count
    bounds = [(i * size, (i + 1) * size) for i in range(window_count)]
    bounds[-1] = (bounds[-1][0], n)
    return bounds


def windowed_means(profile: ReuseProfile, window_count: int = 100) -> list[float]:
    d = profile.distances
    out = []
    for lo, hi in window_bounds(len(d), window_count):
        w = d[lo:hi]
        w = w[w != COLD]
        out.append(float(w.mean()) if len(w) else 0.0)
    return out


def read_trace(text: str) -> np.ndarray:
    return np.array([int(t) for t in text.split()], dtype=np.int64)


def write_trace(trace) -> str:
    return "".join(f"{v}\n" for v in np.asarray(trace).tolist())
