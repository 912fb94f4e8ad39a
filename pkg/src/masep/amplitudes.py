"""Bethe amplitude columns built from reduced words of permutations.

Permutations are tuples in one-line notation, ``sigma = (sigma(1), ...,
sigma(N))`` with values ``1..N``.  The adjacent transposition ``T_l`` swaps
the entries in positions ``l`` and ``l + 1``.

A reduced word is stored as the tuple ``(l_k, ..., l_1)``, i.e. in the order
the product ``T_{l_k} ... T_{l_1}`` is written.  Its letters act on the
identity right to left: ``l_1`` first.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

from .algebra import AmplitudeVector, apply_local, basis, build_R

__all__ = [
    "is_permutation",
    "reduced_word",
    "word_to_permutation",
    "inversions",
    "factor_schedule",
    "amplitude_column",
    "energy",
    "permutations",
]


def is_permutation(sigma: Sequence[int]) -> bool:
    return sorted(sigma) == list(range(1, len(sigma) + 1))


def permutations(n: int) -> list[tuple[int, ...]]:
    """All of ``S_n`` in lexicographic one-line order."""
    return list(itertools.permutations(range(1, n + 1)))


def inversions(sigma: Sequence[int]) -> int:
    return sum(1 for a, b in itertools.combinations(sigma, 2) if a > b)


def word_to_permutation(letters: Sequence[int], n: int) -> tuple[int, ...]:
    w = list(range(1, n + 1))
    for l in reversed(letters):
        if not 1 <= l <= n - 1:
            raise ValueError(f"letter {l} outside 1..{n - 1}")
        w[l - 1], w[l] = w[l], w[l - 1]
    return tuple(w)


@lru_cache(maxsize=None)
def reduced_word(sigma: tuple[int, ...]) -> tuple[int, ...]:
    """Bubble-sort decomposition of ``sigma``; length is the inversion number.

    Bubble-sorting ``sigma`` back to the identity records swaps
    ``s_1, ..., s_k``.  Undoing them in reverse gives
    ``sigma = T_{s_1} ... T_{s_k}``, so the recorded sequence already is the
    word in written order.
    """
    sigma = tuple(sigma)
    if not is_permutation(sigma):
        raise ValueError(f"{sigma} is not a permutation of 1..{len(sigma)}")
    w = list(sigma)
    swaps = []
    for end in range(len(w) - 1, 0, -1):
        for a in range(end):
            if w[a] > w[a + 1]:
                w[a], w[a + 1] = w[a + 1], w[a]
                swaps.append(a + 1)
    return tuple(swaps)


def factor_schedule(letters: Sequence[int], n: int) -> list[tuple[int, int, int]]:
    """``(l, beta, alpha)`` for each factor in application order.

    The factor applied at step ``i`` is ``T_{l_i, beta, alpha}`` with
    ``beta = sigma^(i-1)(l_i + 1)`` and ``alpha = sigma^(i-1)(l_i)``, where
    ``sigma^(i-1)`` is the partial product of the earlier letters.
    """
    w = list(range(1, n + 1))
    out = []
    for l in reversed(letters):
        out.append((l, w[l], w[l - 1]))
        w[l - 1], w[l] = w[l], w[l - 1]
    return out


def amplitude_column(sigma, nu, xis, letters=None, n: int | None = None) -> AmplitudeVector:
    """``A_sigma e_nu`` as a sparse vector over words.

    Parameters
    ----------
    sigma : tuple of int
        Permutation in one-line notation.
    nu : sequence of int
        Initial species word.
    xis : sequence
        Spectral parameters ``xi_1..xi_N``; scalars or equally shaped arrays.
    letters : sequence of int, optional
        Any word (reduced or not) for ``sigma``.  Defaults to
        :func:`reduced_word`.  The result does not depend on the choice.
    n : int, optional
        Alphabet size; defaults to ``max(N, max(nu))``.
    """
    sigma, nu = tuple(sigma), tuple(nu)
    N = len(nu)
    if len(sigma) != N or len(xis) != N:
        raise ValueError("sigma, nu and xis must all have length N")
    if n is None:
        n = max(N, max(nu))
    if letters is None:
        letters = reduced_word(sigma)
    elif word_to_permutation(letters, N) != sigma:
        raise ValueError(f"word {tuple(letters)} does not represent {sigma}")
    vec = basis(nu, n)
    for l, beta, alpha in factor_schedule(letters, N):
        vec = apply_local(build_R(n, xis[beta - 1], xis[alpha - 1]), l, vec)
    return vec


def energy(xi, p: float):
    """Single-particle eigenvalue ``p/xi + (1-p) xi - 1``."""
    return p / xi + (1 - p) * xi - 1
