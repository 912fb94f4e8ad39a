"""
One distribution, three ways
============================

The same transition law computed from the contour-integral formula, by
uniformization of the Markov chain, and by Gillespie sampling.
"""

import time

import numpy as np

from masep.contour import full_distribution
from masep.model import state
from masep.montecarlo import SimulationPlan, empirical_distribution
from masep.oracle import uniformized_distribution

init = state([0, 1], [2, 1])
t, p, window = 1.0, 0.7, (-12, 12)

start = time.perf_counter()
exact = full_distribution(init, t, p, window)
print(f"contour quadrature: {len(exact)} cells, total {exact.total():.12f}, "
      f"{exact.info['nodes']} nodes per circle, {time.perf_counter() - start:.2f} s")

start = time.perf_counter()
oracle = uniformized_distribution(init, t, p)
print(f"uniformization: {oracle.info['states']} states, depth {oracle.info['depth']}, "
      f"{time.perf_counter() - start:.2f} s")
print("max |exact - oracle| in window:", exact.max_abs_diff(oracle.restrict(*window)))

###############################################################################
# Sampling agrees to within the binomial standard error.
start = time.perf_counter()
emp = empirical_distribution(SimulationPlan(init, t, p, 20_000, master_seed=1))
print(f"Monte Carlo: 20000 paths, {time.perf_counter() - start:.2f} s")
z = np.array([abs(f - exact[s]) / emp.stderr[s] for s, f in emp.probs.items() if emp.stderr[s] > 0])
print(f"largest z-score {z.max():.2f}, share within 3 SE {np.mean(z <= 3):.3f}")

print("\nmost likely states")
for s, v in sorted(exact.probs.items(), key=lambda kv: -kv[1])[:6]:
    print(f"  {str(s):<22s} exact {v:.6f}  sampled {emp[s]:.6f}")
