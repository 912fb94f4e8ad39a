"""Gillespie sampling of the process.

Each path owns a counter-based Philox stream keyed by the master seed, with
the path index in the top counter word, so a path's outcome depends only on
``(master_seed, path_index)``.  Aggregation merges integer counts, which
makes the table independent of how paths are split across workers.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import MarkovState, enumerate_transitions
from .table import Distribution

__all__ = ["SimulationPlan", "path_rng", "sample_path", "empirical_distribution"]


@dataclass(frozen=True)
class SimulationPlan:
    initial: MarkovState
    t_end: float
    p: float
    n_paths: int
    master_seed: int = 0

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if self.t_end < 0:
            raise ValueError("t_end must be >= 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")


def path_rng(master_seed: int, path_index: int) -> np.random.Generator:
    bitgen = np.random.Philox(key=master_seed, counter=[0, 0, 0, path_index])
    return np.random.Generator(bitgen)


class _Moves:
    """Per-state cache of targets and cumulative rates."""

    def __init__(self, p: float):
        self.p = p
        self.cache: dict[MarkovState, tuple[list[MarkovState], list[float]]] = {}

    def __call__(self, st: MarkovState):
        hit = self.cache.get(st)
        if hit is None:
            trans = enumerate_transitions(st, self.p)
            cum, acc = [], 0.0
            for tr in trans:
                acc += tr.rate
                cum.append(acc)
            hit = ([tr.target for tr in trans], cum)
            self.cache[st] = hit
        return hit


def _run(plan: SimulationPlan, path_index: int, moves: _Moves) -> tuple[MarkovState, int]:
    rng = path_rng(plan.master_seed, path_index)
    st, clock, jumps = plan.initial, 0.0, 0
    while True:
        targets, cum = moves(st)
        total = cum[-1] if cum else 0.0
        if total <= 0.0:
            return st, jumps
        # inverse-CDF exponential; 1 - U lies in (0, 1]
        clock += -math.log(1.0 - rng.random()) / total
        if clock > plan.t_end:
            return st, jumps
        u = rng.random() * total
        k = 0
        while cum[k] <= u and k < len(cum) - 1:
            k += 1
        st = targets[k]
        jumps += 1


def sample_path(plan: SimulationPlan, path_index: int, return_jumps: bool = False):
    """State at ``plan.t_end`` along path ``path_index``."""
    st, jumps = _run(plan, path_index, _Moves(plan.p))
    return (st, jumps) if return_jumps else st


def _count_range(plan: SimulationPlan, start: int, stop: int) -> Counter:
    moves = _Moves(plan.p)
    return Counter(_run(plan, i, moves)[0] for i in range(start, stop))


def empirical_distribution(plan: SimulationPlan, workers: int = 1) -> Distribution:
    """Frequencies over ``plan.n_paths`` paths with binomial standard errors
    ``sqrt(f (1 - f) / n)``."""
    n = plan.n_paths
    if workers <= 1 or n < 1000:
        counts = _count_range(plan, 0, n)
    else:
        bounds = np.linspace(0, n, workers + 1).astype(int)
        counts = Counter()
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_count_range, plan, int(a), int(b))
                    for a, b in zip(bounds, bounds[1:])]
            for f in futs:
                counts.update(f.result())
    probs = {st: c / n for st, c in sorted(counts.items())}
    se = {st: math.sqrt(f * (1.0 - f) / n) for st, f in probs.items()}
    return Distribution(probs, se, info={"paths": n, "seed": plan.master_seed})
