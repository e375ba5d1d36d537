"""First-order LRU model of an inclusive three-level cache hierarchy.

An access with reuse distance ``d`` misses level X when ``d >= capacity_X``
(capacity counted in elements). Cold accesses are compulsory misses at
every level and are kept apart from the reuse-driven counts.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .reuse import ReuseProfile


@dataclass(frozen=True)
class CacheSpec:
    l1_bytes: int = 32768
    l2_bytes: int = 262144
    l3_bytes: int = 25165824
    element_bytes: int = 66
    c2: float = 10.0
    c3: float = 38.0
    cm: float = 175.0

    def __post_init__(self):
        if self.element_bytes < 1:
            raise ValueError("element_bytes must be at least 1")
        if not 0 <= self.l1_bytes <= self.l2_bytes <= self.l3_bytes:
            raise ValueError("cache sizes must satisfy l1 <= l2 <= l3")

    def capacities(self) -> tuple[int, int, int]:
        return tuple(element_capacity(b, self.element_bytes)
                     for b in (self.l1_bytes, self.l2_bytes, self.l3_bytes))


@dataclass(frozen=True)
class MissModel:
    e1: int
    e2: int
    e3: int
    n1: int
    n2: int
    n3: int
    n_cold: int
    n_accesses: int

    @property
    def m1(self) -> float:
        return self.n1 / self.n_accesses if self.n_accesses else 0.0

    @property
    def m2(self) -> float:
        return self.n2 / self.n1 if self.n1 else 0.0

    @property
    def m3(self) -> float:
        return self.n3 / self.n2 if self.n2 else 0.0

    def to_dict(self, spec: CacheSpec | None = None) -> dict:
        d = asdict(self)
        d.update(m1=self.m1, m2=self.m2, m3=self.m3)
        if spec is not None:
            d["cost_cycles"] = access_cost(self, spec)
        return d

    def to_json(self, spec: CacheSpec | None = None) -> str:
        return json.dumps(self.to_dict(spec), indent=2)


def element_capacity(cache_bytes: int, element_bytes: int) -> int:
    if element_bytes <= 0:
        raise ValueError("element_bytes must be positive")
    return cache_bytes // element_bytes


def model_misses(profile: ReuseProfile, spec: CacheSpec | None = None,
                 capacities: tuple[int, int, int] | None = None) -> MissModel:
    """Reuse-driven misses per level by binary search on sorted distances."""
    spec = spec or CacheSpec()
    e1, e2, e3 = capacities if capacities is not None else spec.capacities()
    s = profile.finite_distances_sorted
    n1, n2, n3 = (int(len(s) - np.searchsorted(s, e, side="left")) for e in (e1, e2, e3))
    return MissModel(e1, e2, e3, n1, n2, n3, profile.n_cold, profile.n_accesses)


def access_cost_rates(m1: float, m2: float, m3: float, n_accesses: int,
                      c2: float, c3: float, cm: float) -> float:
    return (m1 * c2 + m1 * m2 * c3 + m1 * m2 * m3 * cm) * n_accesses


def access_cost(model: MissModel, spec: CacheSpec | None = None) -> float:
    """Extra cycles spent on reuse misses, in the nested-rate form.

    Cross-checked against the equivalent count form n1*c2 + n2*c3 + n3*cm.
    """
    spec = spec or CacheSpec()
    cost = access_cost_rates(model.m1, model.m2, model.m3, model.n_accesses,
                             spec.c2, spec.c3, spec.cm)
    counted = model.n1 * spec.c2 + model.n2 * spec.c3 + model.n3 * spec.cm
    if not math.isclose(cost, counted, rel_tol=1e-6, abs_tol=1e-9):
        raise ArithmeticError(f"rate form {cost} disagrees with count form {counted}")
    return cost


def estimate_capacity(profile: ReuseProfile, observed_misses: int) -> int:
    """Capacity implied by assuming the ``observed_misses`` largest reuse
    distances are exactly the accesses that missed."""
    s = profile.finite_distances_sorted
    if not 0 < observed_misses <= len(s):
        raise ValueError(f"observed_misses must lie in 1..{len(s)}")
    return int(s[len(s) - observed_misses])
