"""Executable identity suites for the two-site algebra and the amplitudes.

Each check returns the largest residual it saw; :func:`run_all` bundles
them into :class:`CheckResult` rows against fixed tolerances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import (AmplitudeVector, apply_local, basis, build_B, build_B1, build_B2,
                      build_R, identity, words)
from .amplitudes import amplitude_column, permutations, word_to_permutation

__all__ = [
    "CheckResult",
    "random_xis",
    "b_relation_residual",
    "r_inverse_residual",
    "ybe_residual",
    "ybe_block_residual",
    "multiset_shapes",
    "boundary_residual",
    "all_reduced_words",
    "word_independence_residual",
    "run_all",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<48s} max residual {self.residual:.3e} (tol {self.tol:.0e})"


def random_xis(rng: np.random.Generator, k: int, rmin: float = 1.1, rmax: float = 3.0):
    """``k`` random complex points with modulus in ``[rmin, rmax]``."""
    r = rng.uniform(rmin, rmax, size=k)
    th = rng.uniform(0, 2 * np.pi, size=k)
    return [complex(v) for v in r * np.exp(1j * th)]


def _abs(v) -> float:
    return float(abs(complex(v)))


def b_relation_residual(n: int) -> int:
    """Largest entry of ``B - B1 + B2 - 2I`` in exact integer arithmetic."""
    diff = build_B(n) - build_B1(n) + build_B2(n) - identity(n).scale(2)
    return max((abs(v) for v in diff.entries.values()), default=0)


def r_inverse_residual(n: int, xi_beta, xi_alpha) -> float:
    prod = build_R(n, xi_beta, xi_alpha) @ build_R(n, xi_alpha, xi_beta)
    diff = prod - identity(n)
    return max((_abs(v) for v in diff.entries.values()), default=0.0)


def _ybe_sides(v: AmplitudeVector, n, xa, xb, xg):
    r = lambda b, a: build_R(n, b, a)  # noqa: E731
    lhs = apply_local(r(xg, xb), 1, apply_local(r(xg, xa), 2, apply_local(r(xb, xa), 1, v)))
    rhs = apply_local(r(xb, xa), 2, apply_local(r(xg, xa), 1, apply_local(r(xg, xb), 2, v)))
    return lhs, rhs


def ybe_residual(n: int, xi_alpha, xi_beta, xi_gamma) -> float:
    """Yang-Baxter defect on the whole three-letter word space."""
    worst = 0.0
    for w in words(n, 3):
        lhs, rhs = _ybe_sides(basis(w, n), n, xi_alpha, xi_beta, xi_gamma)
        diff = lhs - rhs
        worst = max(worst, max((_abs(c) for c in diff.coeffs.values()), default=0.0))
    return worst


def multiset_shapes(n: int) -> dict[str, list[tuple[int, int, int]]]:
    """Three-letter multisets over ``1..n`` grouped by shape."""
    rng = range(1, n + 1)
    return {
        "[i,i,i]": [(i, i, i) for i in rng],
        "[i,i,j] i<j": [(i, i, j) for i in rng for j in rng if i < j],
        "[i,i,j] i>j": [(i, i, j) for i in rng for j in rng if i > j],
        "[i,j,k]": list(itertools.combinations(rng, 3)),
    }


def ybe_block_residual(multiset, n: int, xi_alpha, xi_beta, xi_gamma):
    """Yang-Baxter defect restricted to the block of one multiset.

    Works in exact arithmetic when the spectral parameters are
    :class:`fractions.Fraction`; the return value is then exact too.
    """
    worst = 0
    for w in sorted(set(itertools.permutations(multiset))):
        lhs, rhs = _ybe_sides(basis(w, n), n, xi_alpha, xi_beta, xi_gamma)
        diff = lhs - rhs
        for c in diff.coeffs.values():
            worst = max(worst, abs(c))
    return worst


def boundary_residual(nu, xis, l: int) -> float:
    """``| sum_sigma (I - B^(l)/xi_sigma(l)) A_sigma e_nu |_max``."""
    N = len(nu)
    n = max(N, max(nu))
    B = build_B(n)
    acc = AmplitudeVector(n, N, {})
    for sigma in permutations(N):
        col = amplitude_column(sigma, nu, xis, n=n)
        acc = acc + col - apply_local(B, l, col).scale(1 / xis[sigma[l - 1] - 1])
    return acc.max_abs()


def all_reduced_words(sigma) -> list[tuple[int, ...]]:
    """Every reduced word of ``sigma`` in written order ``(l_k, ..., l_1)``."""
    sigma = tuple(sigma)
    descents = [d for d in range(1, len(sigma)) if sigma[d - 1] > sigma[d]]
    if not descents:
        return [()]
    out = []
    for d in descents:
        rest = list(sigma)
        rest[d - 1], rest[d] = rest[d], rest[d - 1]
        out.extend((d,) + tail for tail in all_reduced_words(tuple(rest)))
    return out


def word_independence_residual(sigma, nus, xis) -> float:
    """Spread of ``A_sigma e_nu`` across two reduced words and one word
    padded with a cancelling ``T_i T_i`` pair."""
    N = len(sigma)
    reduced = all_reduced_words(sigma)
    choices = [reduced[0], reduced[-1], (1, 1) + reduced[0]]
    assert all(word_to_permutation(w, N) == tuple(sigma) for w in choices)
    worst = 0.0
    for nu in nus:
        cols = [amplitude_column(sigma, nu, xis, letters=w) for w in choices]
        for other in cols[1:]:
            worst = max(worst, (cols[0] - other).max_abs())
    return worst


def run_all(n_max: int = 5, trials: int = 100, seed: int = 7) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    for n in range(1, 7):
        results.append(CheckResult(f"B - B1 + B2 = 2I  (n={n}, exact)", b_relation_residual(n), 0))
    for n in range(2, n_max + 1):
        worst = max(r_inverse_residual(n, *random_xis(rng, 2)) for _ in range(trials))
        results.append(CheckResult(f"R_ba R_ab = I  (n={n}, {trials} draws)", worst, 1e-12))
    for n in range(2, n_max + 1):
        worst = max(ybe_residual(n, *random_xis(rng, 3)) for _ in range(trials))
        results.append(CheckResult(f"Yang-Baxter  (n={n}, {trials} draws)", worst, 1e-12))
    for shape, sets in multiset_shapes(3).items():
        worst = 0.0
        for _ in range(trials):
            xis = random_xis(rng, 3)
            worst = max(worst, *(float(ybe_block_residual(ms, 3, *xis)) for ms in sets))
        results.append(CheckResult(f"Yang-Baxter block {shape}", worst, 1e-12))
    worst = 0.0
    for nu in itertools.product((1, 2, 3), repeat=3):
        for _ in range(max(1, trials // 10)):
            xis = random_xis(rng, 3)
            worst = max(worst, *(boundary_residual(nu, xis, l) for l in (1, 2)))
    results.append(CheckResult("boundary condition  (N=3, all nu, l=1,2)", worst, 1e-10))
    nus = sorted(set(itertools.permutations((1, 2, 3, 4)))) + [(1, 1, 2, 3), (3, 2, 1, 1), (2, 1, 2, 1)]
    xis = random_xis(rng, 4)
    worst = max(word_independence_residual(s, nus, xis) for s in permutations(4))
    results.append(CheckResult("reduced-word independence  (all 24 of S_4)", worst, 1e-12))
    return results
