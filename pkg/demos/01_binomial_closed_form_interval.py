"""
Closed-form truncation of a binomial sum
========================================

For K ~ Binomial(n, p) the Massart tail rate gives the summation range in
closed form. Everything outside [T-, T+] carries less than eta of the mass.
"""

from truncprob import BinomialCount, CountInterval, binomial_truncation_closed_form, interval_mass

n, p, eta = 100, 0.5, 0.01
iv = binomial_truncation_closed_form(n, p, eta, 0, n)
print(f"retain k in [{iv.k_lo}, {iv.k_hi}]  ({iv.size} of {n + 1} terms)")

# the discarded tails, summed exactly
dist = BinomialCount(n, p)
lost = interval_mass(dist, CountInterval(0, iv.k_lo - 1)) + interval_mass(dist, CountInterval(iv.k_hi + 1, n))
print(f"discarded mass {lost:.3e} < eta = {eta}")

# a query that already sits inside the interval is left alone
print(binomial_truncation_closed_form(n, p, eta, 50, 60))

# the retained width grows only like sqrt(n log(1/eta))
for n in (10**3, 10**4, 10**5, 10**6):
    iv = binomial_truncation_closed_form(n, 0.5, 1e-9, 0, n)
    print(f"n = {n:>8}: {iv.size:>6} terms kept")
