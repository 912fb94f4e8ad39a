"""Brute-force ground truth by uniformization of the jump chain.

Every state exits at total rate at most ``N`` (each particle carries one
unit-rate clock), so with ``lam = N`` the kernel ``K = I + Q/lam`` is
stochastic and

    P(t) = sum_k Poisson(k; lam t) * delta_initial K^k.

Truncating the sum at ``K`` jumps only needs the states reachable in at
most ``K`` jumps, which are explored breadth first.  The discarded Poisson
tail is the whole truncation error.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse, stats

from .model import MarkovState, enumerate_transitions
from .table import Distribution

__all__ = [
    "GeneratorGraph",
    "UniformizationParams",
    "StateBudgetExceeded",
    "explore_reachable",
    "poisson_depth",
    "uniformized_distribution",
    "single_particle_closed_form",
]


class StateBudgetExceeded(RuntimeError):
    def __init__(self, message, frontier):
        super().__init__(message)
        self.frontier = frontier


@dataclass
class GeneratorGraph:
    states: list[MarkovState]
    index: dict[MarkovState, int]
    arcs: list[tuple[int, int, float]]
    exit: np.ndarray
    depth: np.ndarray
    # states whose outgoing arcs were not expanded
    frontier: set[int] = field(default_factory=set)

    def __len__(self):
        return len(self.states)

    def generator(self) -> sparse.csr_matrix:
        """Rate matrix ``Q`` (rows = source) on the explored states."""
        n = len(self.states)
        if self.arcs:
            src, dst, rate = map(np.asarray, zip(*self.arcs))
        else:
            src = dst = np.zeros(0, dtype=int)
            rate = np.zeros(0)
        Q = sparse.coo_matrix((rate, (src, dst)), shape=(n, n)).tocsr()
        return Q - sparse.diags(self.exit)


@dataclass(frozen=True)
class UniformizationParams:
    lam: float | None = None
    tail_tol: float = 1e-12
    depth: int | None = None
    max_states: int = 2_000_000


def explore_reachable(initial: MarkovState, p: float, depth: int,
                      max_states: int = 2_000_000) -> GeneratorGraph:
    """States reachable in at most ``depth`` jumps, with merged arcs."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    states = [initial]
    index = {initial: 0}
    dist = [0]
    arcs: list[tuple[int, int, float]] = []
    exits = []
    frontier = set()
    queue = deque([0])
    while queue:
        a = queue.popleft()
        st = states[a]
        trans = enumerate_transitions(st, p)
        exits.append((a, sum(tr.rate for tr in trans)))
        if dist[a] >= depth:
            frontier.add(a)
            continue
        merged: dict[int, float] = {}
        for tr in trans:
            b = index.get(tr.target)
            if b is None:
                if len(states) >= max_states:
                    raise StateBudgetExceeded(
                        f"state budget {max_states} exceeded at depth {dist[a] + 1}",
                        frontier=len(queue),
                    )
                b = len(states)
                states.append(tr.target)
                index[tr.target] = b
                dist.append(dist[a] + 1)
                queue.append(b)
            merged[b] = merged.get(b, 0.0) + tr.rate
        arcs.extend((a, b, r) for b, r in sorted(merged.items()))
    exit_arr = np.zeros(len(states))
    for a, r in exits:
        exit_arr[a] = r
    return GeneratorGraph(states, index, arcs, exit_arr, np.asarray(dist), frontier)


def poisson_depth(mean: float, tail_tol: float) -> int:
    """Smallest ``K`` with ``P(Poisson(mean) > K) < tail_tol``."""
    if mean <= 0:
        return 0
    k = int(stats.poisson.isf(tail_tol, mean))
    while stats.poisson.sf(k, mean) >= tail_tol:
        k += 1
    return k


def uniformized_distribution(initial: MarkovState, t: float, p: float,
                             params: UniformizationParams | None = None) -> Distribution:
    """Law of the state at time ``t`` started from ``initial``.

    ``info`` reports the jump cap, the Poisson tail beyond it and the
    explored-graph size.  ``leaked`` is ``1 - total``.
    """
    if t < 0 or not 0.0 <= p <= 1.0:
        raise ValueError("need t >= 0 and 0 <= p <= 1")
    params = params or UniformizationParams()
    N = initial.n
    lam = float(N) if params.lam is None else float(params.lam)
    mean = lam * t
    K = params.depth if params.depth is not None else poisson_depth(mean, params.tail_tol)
    graph = explore_reachable(initial, p, K, params.max_states)
    if graph.exit.max(initial=0.0) > lam + 1e-12:
        raise ValueError(f"uniformization rate {lam} below max exit rate {graph.exit.max()}")

    n = len(graph)
    if mean == 0:
        vec = np.zeros(n)
        vec[0] = 1.0
        tail = 0.0
    else:
        kernel = (sparse.identity(n, format="csr") + graph.generator() / lam).T.tocsr()
        cur = np.zeros(n)
        cur[0] = 1.0
        vec = np.zeros(n)
        weights = stats.poisson.pmf(np.arange(K + 1), mean)
        for k in range(K + 1):
            vec += weights[k] * cur
            if k < K:
                cur = kernel @ cur
        tail = float(stats.poisson.sf(K, mean))
    probs = {st: float(vec[a]) for a, st in enumerate(graph.states) if vec[a] != 0.0}
    total = float(vec.sum())
    info = {
        "total": total,
        "leaked": 1.0 - total,
        "poisson_tail": tail,
        "depth": K,
        "lam": lam,
        "states": n,
    }
    return Distribution(probs, info=info)


def single_particle_closed_form(offset: int, t: float, p: float, tol: float = 1e-14) -> float:
    """Law of a lone particle's displacement after time ``t``.

    Sums over jump counts: ``a`` right jumps and ``b = a - offset`` left
    jumps, independent Poisson(``p t``) and Poisson(``q t``) counts.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    q = 1.0 - p
    if t == 0:
        return 1.0 if offset == 0 else 0.0
    if p == 0.0:
        return stats.poisson.pmf(-offset, t) if offset <= 0 else 0.0
    if q == 0.0:
        return stats.poisson.pmf(offset, t) if offset >= 0 else 0.0
    a = max(offset, 0)
    total = 0.0
    log_pt, log_qt = math.log(p * t), math.log(q * t)
    while True:
        b = a - offset
        term = math.exp(-t + a * log_pt - math.lgamma(a + 1) + b * log_qt - math.lgamma(b + 1))
        total += term
        # terms are eventually decreasing with ratio p q t^2 / ((a+1)(b+1))
        ratio = p * q * t * t / ((a + 1) * (b + 1))
        if ratio < 0.5 and term / (1 - ratio) < tol:
            break
        if term == 0.0 and ratio < 1:
            break
        a += 1
    return total
