"""Two-site matrices on the word space and their lazy tensor lifts.

Every matrix here acts on ``C^(n^2)`` with basis vectors labelled by
letter pairs ``ij`` in lexicographic order ``11, 12, ..., nn``.  They are
stored sparsely as ``{(row_pair, col_pair): value}``.  Values may be ints,
:class:`fractions.Fraction`, complex numbers or numpy arrays (one entry per
quadrature node); all arithmetic is written so any of these works.

A lifted operator acting on letters ``l, l+1`` of a length-``N`` word is
never materialised: :func:`apply_local` walks the support of a sparse
:class:`AmplitudeVector` instead.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np

__all__ = [
    "PoleError",
    "LocalMatrix",
    "AmplitudeVector",
    "pairs",
    "build_B",
    "build_B1",
    "build_B2",
    "identity",
    "s_amp",
    "t_amp",
    "build_R",
    "apply_local",
    "basis",
    "lift_dense",
    "words",
]

Pair = tuple[int, int]
Word = tuple[int, ...]


class PoleError(ZeroDivisionError):
    """A spectral parameter sits on the pole ``xi = 1`` of the scattering
    amplitudes."""


def _is_zero(v) -> bool:
    return not isinstance(v, np.ndarray) and v == 0


def pairs(n: int) -> list[Pair]:
    """Two-letter labels in lexicographic order."""
    return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]


def words(n: int, length: int) -> list[Word]:
    """All words of ``length`` letters over ``1..n``, lexicographic."""
    return list(itertools.product(range(1, n + 1), repeat=length))


@dataclass(frozen=True)
class LocalMatrix:
    n: int
    entries: dict[tuple[Pair, Pair], Any]
    _columns: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        clean = {k: v for k, v in self.entries.items() if not _is_zero(v)}
        object.__setattr__(self, "entries", clean)
        cols: dict[Pair, list] = {}
        for (row, col), v in clean.items():
            if sorted(row) != sorted(col):
                raise ValueError(f"entry {row}<-{col} mixes two-letter sectors")
            cols.setdefault(col, []).append((row, v))
        object.__setattr__(self, "_columns", cols)

    def __getitem__(self, key: tuple[Pair, Pair]):
        return self.entries.get(key, 0)

    def column(self, col: Pair) -> list[tuple[Pair, Any]]:
        return self._columns.get(col, [])

    def to_dense(self, dtype=complex) -> np.ndarray:
        """Dense ``n^2 x n^2`` array; only meaningful for scalar entries."""
        labels = {pr: a for a, pr in enumerate(pairs(self.n))}
        out = np.zeros((self.n ** 2, self.n ** 2), dtype=dtype)
        for (row, col), v in self.entries.items():
            out[labels[row], labels[col]] = v
        return out

    def __matmul__(self, other: "LocalMatrix") -> "LocalMatrix":
        if other.n != self.n:
            raise ValueError("alphabet sizes differ")
        acc: dict = {}
        for (mid, col), b in other.entries.items():
            for row, a in self.column(mid):
                key = (row, col)
                acc[key] = acc.get(key, 0) + a * b
        return LocalMatrix(self.n, acc)

    def _combine(self, other: "LocalMatrix", sign: int) -> "LocalMatrix":
        acc = dict(self.entries)
        for key, v in other.entries.items():
            acc[key] = acc.get(key, 0) + sign * v
        return LocalMatrix(self.n, acc)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scale(self, c) -> "LocalMatrix":
        return LocalMatrix(self.n, {k: c * v for k, v in self.entries.items()})


def identity(n: int, one=1) -> LocalMatrix:
    return LocalMatrix(n, {(pr, pr): one for pr in pairs(n)})


def build_B(n: int) -> LocalMatrix:
    """Permissibility of the right jump ``(x-1, x, lm) -> (x, x+1, ij)``."""
    ent = {}
    for i, j in pairs(n):
        if i >= j:
            ent[(i, j), (i, j)] = 1
        if i > j:
            ent[(i, j), (j, i)] = 1
    return LocalMatrix(n, ent)


def build_B1(n: int) -> LocalMatrix:
    """Permissibility of the left-jump swap ``(x, x+1, lm) -> (x, x+1, ij)``."""
    return LocalMatrix(n, {((i, j), (j, i)): 1 for i, j in pairs(n) if i > j})


def build_B2(n: int) -> LocalMatrix:
    """Diagonal left-jump exit count of a nearest-neighbour pair."""
    return LocalMatrix(n, {((i, j), (i, j)): 1 if i >= j else 2 for i, j in pairs(n)})


def _one_minus_inv(xi):
    d = 1 - 1 / xi
    if isinstance(d, np.ndarray):
        if np.any(d == 0):
            raise PoleError("spectral parameter equal to 1")
    elif d == 0:
        raise PoleError("spectral parameter equal to 1")
    return d


def s_amp(xi_beta, xi_alpha):
    """Diagonal scattering amplitude ``-(1 - 1/xi_alpha) / (1 - 1/xi_beta)``."""
    return -(1 - 1 / xi_alpha) / _one_minus_inv(xi_beta)


def t_amp(xi_beta, xi_alpha):
    """Transfer amplitude ``(1/xi_alpha - 1/xi_beta) / (1 - 1/xi_beta)``."""
    return (1 / xi_alpha - 1 / xi_beta) / _one_minus_inv(xi_beta)


def build_R(n: int, xi_beta, xi_alpha) -> LocalMatrix:
    """Two-site scattering matrix exchanging ``xi_alpha`` and ``xi_beta``.

    Equal to ``-(I - B/xi_beta)^{-1} (I - B/xi_alpha)``, evaluated blockwise.
    """
    s = s_amp(xi_beta, xi_alpha)
    t = t_amp(xi_beta, xi_alpha)
    ent = {}
    for i, j in pairs(n):
        ent[(i, j), (i, j)] = s if i >= j else -1
        if i > j:
            ent[(i, j), (j, i)] = t
    return LocalMatrix(n, ent)


@dataclass
class AmplitudeVector:
    """Sparse vector on length-``length`` words over ``1..n``."""

    n: int
    length: int
    coeffs: dict[Word, Any]

    def __getitem__(self, word) -> Any:
        return self.coeffs.get(tuple(word), 0)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.coeffs)

    def support(self) -> set[Word]:
        return {w for w, c in self.coeffs.items() if np.any(c != 0)}

    def __sub__(self, other: "AmplitudeVector") -> "AmplitudeVector":
        acc = dict(self.coeffs)
        for w, c in other.coeffs.items():
            acc[w] = acc.get(w, 0) - c
        return AmplitudeVector(self.n, self.length, acc)

    def __add__(self, other: "AmplitudeVector") -> "AmplitudeVector":
        acc = dict(self.coeffs)
        for w, c in other.coeffs.items():
            acc[w] = acc.get(w, 0) + c
        return AmplitudeVector(self.n, self.length, acc)

    def scale(self, c) -> "AmplitudeVector":
        return AmplitudeVector(self.n, self.length, {w: c * v for w, v in self.coeffs.items()})

    def max_abs(self) -> float:
        if not self.coeffs:
            return 0.0
        return max(float(np.max(np.abs(c))) for c in self.coeffs.values())

    def to_dense(self) -> np.ndarray:
        index = {w: a for a, w in enumerate(words(self.n, self.length))}
        out = np.zeros(self.n ** self.length, dtype=complex)
        for w, c in self.coeffs.items():
            out[index[w]] = c
        return out


def basis(word, n: int | None = None, one=1) -> AmplitudeVector:
    word = tuple(word)
    if n is None:
        n = max(word)
    return AmplitudeVector(n, len(word), {word: one})


def apply_local(op: LocalMatrix, l: int, v: AmplitudeVector) -> AmplitudeVector:
    """Apply ``I x ... x op x ... x I`` (``op`` on letters ``l, l+1``) to ``v``.

    ``l`` is 1-based.
    """
    if not 1 <= l <= v.length - 1:
        raise IndexError(f"site {l} outside 1..{v.length - 1}")
    if op.n != v.n:
        raise ValueError(f"operator alphabet {op.n} != vector alphabet {v.n}")
    a = l - 1
    out: dict[Word, Any] = {}
    for w, c in v.coeffs.items():
        for (i, j), val in op.column((w[a], w[a + 1])):
            new = w[:a] + (i, j) + w[a + 2:]
            if new in out:
                out[new] = out[new] + val * c
            else:
                out[new] = val * c
    return AmplitudeVector(v.n, v.length, out)


def lift_dense(op: LocalMatrix, l: int, length: int) -> np.ndarray:
    """Dense ``n^length`` square Kronecker lift; for small brute-force checks."""
    eye = np.eye(op.n)
    mats = [eye] * (l - 1) + [op.to_dense()] + [eye] * (length - l - 1)
    out = np.eye(1)
    for m in mats:
        out = np.kron(out, m)
    return out
