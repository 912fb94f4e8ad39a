"""Transition probabilities from the nested-circle contour integral.

For an initial state ``(Y, nu)`` and a final state ``(X, pi)`` the
probability at time ``t`` is

    (2 pi i)^-N  oint ... oint  sum_sigma (A_sigma)_{pi,nu}
        prod_i xi_{sigma(i)}^(x_i - y_{sigma(i)} - 1) exp(eps(xi_i) t)  dxi

over counterclockwise circles ``|xi_i| = R_i`` with ``1 < R_1 < ... < R_N``.
Each circle is discretised with the periodic trapezoid rule, which is
spectrally accurate here: the integrand is analytic on ``|xi| > 1`` apart
from the essential singularity at infinity, so the aliasing error decays
like ``R^-M`` in the node count ``M``.

Single probabilities are summed directly over the tensor grid.  Whole
distributions use the fact that the trapezoid sum over ``prod xi_j^n_j``
is an inverse DFT of the remaining factor, so one FFT per
``(sigma, pi)`` yields every final configuration at once.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .amplitudes import amplitude_column, energy, permutations
from .model import MarkovState
from .table import Distribution

__all__ = [
    "ContourSpec",
    "TransitionQuery",
    "ProbabilityResult",
    "QuadratureNotConverged",
    "default_contour",
    "circle_nodes",
    "trapezoid_circle",
    "integrand",
    "evaluate_probability",
    "full_distribution",
    "sector_words",
    "window_configurations",
]

log = logging.getLogger(__name__)

DEFAULT_BASE_RADIUS = 1.5
DEFAULT_RADIUS_STEP = 0.05
# grid points evaluated per chunk in the direct sum
_CHUNK = 1 << 20


class QuadratureNotConverged(RuntimeError):
    def __init__(self, message, estimate=None, delta=None, nodes=None):
        super().__init__(message)
        self.estimate = estimate
        self.delta = delta
        self.nodes = nodes


@dataclass(frozen=True)
class ContourSpec:
    """Nested circles and trapezoid resolution.

    ``nodes`` is the starting per-circle node count; each refinement
    doubles it, up to ``max_refinements`` times.
    """

    radii: tuple[float, ...]
    nodes: int = 64
    max_refinements: int = 6
    abs_tol: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if not self.radii or self.radii[0] <= 1.0:
            raise ValueError("radii must all exceed 1")
        if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError(f"radii must be strictly increasing, got {self.radii}")
        M = self.nodes
        if M < 8 or M & (M - 1):
            raise ValueError(f"nodes must be a power of two >= 8, got {M}")
        if self.max_refinements < 0:
            raise ValueError("max_refinements must be >= 0")

    @property
    def n(self) -> int:
        return len(self.radii)


def default_contour(n: int, nodes: int = 64, max_refinements: int = 6,
                    abs_tol: float = 1e-10, base: float = DEFAULT_BASE_RADIUS,
                    step: float = DEFAULT_RADIUS_STEP) -> ContourSpec:
    radii = tuple(base + step * i for i in range(n))
    return ContourSpec(radii, nodes, max_refinements, abs_tol)


@dataclass(frozen=True)
class TransitionQuery:
    initial: MarkovState
    final: MarkovState
    t: float
    p: float

    def __post_init__(self):
        if self.initial.n != self.final.n:
            raise ValueError("initial and final states have different particle counts")
        if self.t < 0:
            raise ValueError(f"t must be >= 0, got {self.t}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    @property
    def same_sector(self) -> bool:
        return self.initial.multiset() == self.final.multiset()


@dataclass(frozen=True)
class ProbabilityResult:
    probability: float
    error: float
    refinements: int
    nodes: int
    imag: float = 0.0
    delta: float = 0.0

    def __float__(self):
        return self.probability


def circle_nodes(radius: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``xi_k = R exp(2 pi i k/m)`` and weights for ``dxi / (2 pi i)``.

    With ``xi = R e^{i theta}`` one has ``dxi/(2 pi i) = xi dtheta/(2 pi)``,
    so the trapezoid weight of node ``k`` is ``xi_k / m``.
    """
    xi = radius * np.exp(2j * np.pi * np.arange(m) / m)
    return xi, xi / m


def trapezoid_circle(f, radius: float, m: int) -> complex:
    """``(2 pi i)^-1 oint_{|xi|=R} f(xi) dxi`` with ``m`` trapezoid nodes."""
    xi, w = circle_nodes(radius, m)
    return complex(np.sum(w * f(xi)))


def integrand(xis: Sequence, query: TransitionQuery):
    """Integrand of the transition probability at spectral point(s) ``xis``.

    ``xis`` holds ``N`` scalars or ``N`` broadcast-compatible arrays.
    Returns 0 outright when the species multisets differ.
    """
    if not query.same_sector:
        return 0.0
    nu, pi = query.initial.species, query.final.species
    x, y = query.final.positions, query.initial.positions
    N = len(nu)
    total = 0
    for sigma in permutations(N):
        amp = amplitude_column(sigma, nu, xis)[pi]
        if isinstance(amp, int) and amp == 0:
            continue
        term = amp
        for i in range(N):
            s = sigma[i] - 1
            term = term * xis[s] ** (x[i] - y[s] - 1)
        total = total + term
    growth = 1
    for xi in xis:
        growth = growth * np.exp(energy(xi, query.p) * query.t)
    return total * growth


def _direct_sum(query: TransitionQuery, radii: Sequence[float], m: int) -> complex:
    N = len(radii)
    nodes = [circle_nodes(r, m) for r in radii]
    inner = m ** (N - 1)
    rows = max(1, _CHUNK // inner)
    acc = 0j
    for start in range(0, m, rows):
        sl = slice(start, min(start + rows, m))
        axes = [nodes[0][0][sl]] + [nd[0] for nd in nodes[1:]]
        wts = [nodes[0][1][sl]] + [nd[1] for nd in nodes[1:]]
        grid = np.meshgrid(*axes, indexing="ij", sparse=True)
        wgrid = np.meshgrid(*wts, indexing="ij", sparse=True)
        w = 1
        for wj in wgrid:
            w = w * wj
        vals = np.broadcast_to(integrand(grid, query) * w, tuple(len(a) for a in axes))
        acc += complex(np.sum(vals))
    return acc


def evaluate_probability(query: TransitionQuery, contour: Optional[ContourSpec] = None,
                         raise_on_failure: bool = True) -> ProbabilityResult:
    """Transition probability by adaptive tensor-product trapezoid rule.

    Doubles the node count until two successive estimates differ by less
    than ``contour.abs_tol``.  The reported error is the last difference
    plus the magnitude of the imaginary part, which vanishes for the exact
    integral.

    Raises
    ------
    QuadratureNotConverged
        If the refinement budget runs out first (unless
        ``raise_on_failure`` is false).
    """
    N = query.initial.n
    if contour is None:
        contour = default_contour(N)
    if contour.n != N:
        raise ValueError(f"contour has {contour.n} radii for {N} particles")
    if not query.same_sector:
        return ProbabilityResult(0.0, 0.0, 0, 0)

    m = contour.nodes
    prev = _direct_sum(query, contour.radii, m)
    delta = math.inf
    for r in range(1, contour.max_refinements + 1):
        m *= 2
        cur = _direct_sum(query, contour.radii, m)
        delta = abs(cur - prev)
        log.debug("nodes=%d estimate=%r delta=%.3e", m, cur, delta)
        prev = cur
        if delta < contour.abs_tol:
            return ProbabilityResult(cur.real, abs(cur.imag) + delta, r, m, cur.imag, delta)
    if raise_on_failure:
        raise QuadratureNotConverged(
            f"no convergence after {contour.max_refinements} refinements "
            f"(nodes={m}, delta={delta:.3e})",
            estimate=prev.real, delta=delta, nodes=m,
        )
    return ProbabilityResult(prev.real, abs(prev.imag) + delta, contour.max_refinements, m,
                             prev.imag, delta)


def sector_words(nu: Sequence[int]) -> list[tuple[int, ...]]:
    """Distinct rearrangements of ``nu``, lexicographic."""
    return sorted(set(itertools.permutations(tuple(nu))))


def window_configurations(n: int, lo: int, hi: int) -> np.ndarray:
    """All strictly increasing ``n``-tuples in ``[lo, hi]`` as rows."""
    combos = list(itertools.combinations(range(lo, hi + 1), n))
    return np.array(combos, dtype=np.int64).reshape(len(combos), n)


def _fft_table(initial: MarkovState, t: float, p: float, radii: Sequence[float],
               m: int, configs: np.ndarray, targets: list[tuple[int, ...]]) -> dict:
    """Trapezoid values for every ``(X, pi)`` via one inverse FFT per
    ``(sigma, pi)``.  Returns ``{pi: complex array over configs}``."""
    N = initial.n
    nu, y = initial.species, initial.positions
    axes = [circle_nodes(r, m)[0] for r in radii]
    grid = np.meshgrid(*axes, indexing="ij", sparse=True)
    # everything in the summand except prod_j xi_j^(n_j)
    common = 1
    for j in range(N):
        common = common * grid[j] ** (-y[j]) * np.exp(energy(grid[j], p) * t)
    shape = (m,) * N
    rad = np.asarray(radii)
    out = {pi: np.zeros(len(configs), dtype=complex) for pi in targets}
    for sigma in permutations(N):
        col = amplitude_column(sigma, nu, grid)
        # n_{sigma(i)} = x_i
        expo = np.empty_like(configs)
        for i in range(N):
            expo[:, sigma[i] - 1] = configs[:, i]
        scale = np.prod(rad[None, :] ** expo, axis=1)
        idx = tuple((expo % m).T)
        for pi in targets:
            amp = col[pi]
            if isinstance(amp, int) and amp == 0:
                continue
            g = np.fft.ifftn(np.broadcast_to(amp * common, shape))
            out[pi] += scale * g[idx]
    return out


def full_distribution(initial: MarkovState, t: float, p: float, window: tuple[int, int],
                      contour: Optional[ContourSpec] = None,
                      raise_on_failure: bool = True) -> Distribution:
    """Exact probabilities of every state inside ``window`` at time ``t``.

    Final words range over the rearrangements of ``initial.species``.  The
    returned table's ``info`` holds the total mass, the leaked mass
    ``1 - total``, node count, refinements and the largest per-cell
    refinement delta and imaginary residue.
    """
    lo, hi = window
    N = initial.n
    if not (lo <= initial.positions[0] and initial.positions[-1] <= hi):
        raise ValueError(f"window {window} does not contain the initial configuration")
    if t < 0 or not 0.0 <= p <= 1.0:
        raise ValueError("need t >= 0 and 0 <= p <= 1")
    if contour is None:
        contour = default_contour(N)
    if contour.n != N:
        raise ValueError(f"contour has {contour.n} radii for {N} particles")
    configs = window_configurations(N, lo, hi)
    targets = sector_words(initial.species)

    m = contour.nodes
    prev = _fft_table(initial, t, p, contour.radii, m, configs, targets)
    delta = math.inf
    refinements = 0
    converged = False
    for r in range(1, contour.max_refinements + 1):
        m *= 2
        cur = _fft_table(initial, t, p, contour.radii, m, configs, targets)
        delta = max(float(np.max(np.abs(cur[pi] - prev[pi]))) for pi in targets)
        log.debug("distribution nodes=%d delta=%.3e", m, delta)
        prev, refinements = cur, r
        if delta < contour.abs_tol:
            converged = True
            break
    if not converged and raise_on_failure:
        raise QuadratureNotConverged(
            f"distribution did not converge (nodes={m}, delta={delta:.3e})",
            delta=delta, nodes=m,
        )
    probs = {}
    max_imag = 0.0
    for pi in targets:
        vals = prev[pi]
        max_imag = max(max_imag, float(np.max(np.abs(vals.imag))))
        for row, v in zip(configs, vals):
            probs[MarkovState(tuple(int(a) for a in row), pi)] = float(v.real)
    total = float(sum(probs.values()))
    info = {
        "total": total,
        "leaked": 1.0 - total,
        "nodes": m,
        "refinements": refinements,
        "delta": delta,
        "max_imag": max_imag,
        "converged": converged,
    }
    return Distribution(probs, info=info)
