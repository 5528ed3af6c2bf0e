"""
Cut points from a Chernoff bound
================================

When no closed form is at hand, the cut points come from bisecting the
Chernoff bound function C(z) = inf_t E[exp(t (X - z))], which decreases
monotonically away from the mean.
"""

import numpy as np

from truncprob import PoissonSum, find_truncation_point, generic_C, poisson_C

dist = PoissonSum(n=5, lam=2.0)

# the generic infimum (golden-section over t) reproduces the closed form
for z in (0.5, 1.0, 3.0, 4.0):
    print(f"z = {z}: generic {generic_C(dist, z):.12e}  closed {poisson_C(2.0, 5, z):.12e}")

# C decreases on either side of the mean
deltas = np.linspace(0.05, 1.9, 8)
print(np.round([generic_C(dist, 2.0 - d) for d in deltas], 6))

# invert for a budget of 1e-6 per tail
u = find_truncation_point(dist, 1e-6, "lower")
v = find_truncation_point(dist, 1e-6, "upper")
print(f"average scale: keep ({u:.6f}, {v:.6f}); counts {int(np.floor(5 * u)) + 1}..{int(np.ceil(5 * v)) - 1}")
print("bound at v:", poisson_C(2.0, 5, v))
