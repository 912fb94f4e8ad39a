"""
Two-site scattering algebra
===========================

The two-particle boundary condition is encoded in three small matrices
``B``, ``B1`` and ``B2`` on pairs of species labels.  The scattering
matrix ``R`` built from them satisfies an inversion relation and the
Yang-Baxter equation, which is what lets the many-particle amplitudes be
assembled from two-particle factors.
"""

from fractions import Fraction

import numpy as np

from masep.algebra import build_B, build_B1, build_B2, build_R, identity, pairs
from masep.amplitudes import amplitude_column, reduced_word
from masep.verify import random_xis, ybe_residual

labels = ["".join(map(str, pr)) for pr in pairs(2)]
print("labels", labels)
print("B\n", build_B(2).to_dense(dtype=int))
print("B1\n", build_B1(2).to_dense(dtype=int))
print("B2\n", build_B2(2).to_dense(dtype=int))

###############################################################################
# The three satisfy ``B - B1 + B2 = 2 I`` in exact integer arithmetic.
diff = build_B(4) - build_B1(4) + build_B2(4) - identity(4).scale(2)
print("nonzero entries of B - B1 + B2 - 2I for n=4:", len(diff.entries))

###############################################################################
# With rational spectral parameters R is exact.  Swapping the parameters
# inverts it.
a, b = Fraction(2), Fraction(3)
R = build_R(3, b, a)
print("R block on {12, 21}:", [[str(R[r, c]) for c in [(1, 2), (2, 1)]] for r in [(1, 2), (2, 1)]])
prod = build_R(3, b, a) @ build_R(3, a, b)
print("R_ba R_ab == I:", prod.entries == identity(3).entries)

rng = np.random.default_rng(0)
print("Yang-Baxter residual, n=3, random complex xi:", ybe_residual(3, *random_xis(rng, 3)))

###############################################################################
# Amplitudes are products of lifted R factors along a reduced word.
sigma = (3, 1, 2)
print("reduced word of", sigma, "is", reduced_word(sigma))
col = amplitude_column(sigma, (1, 2, 3), [Fraction(2), Fraction(3), Fraction(5)])
for word, coeff in sorted(col.coeffs.items()):
    print(" ", "".join(map(str, word)), coeff)
