"""
A guaranteed bracket for a box probability
==========================================

Three independent dimensions, a total error budget eta split evenly across
the six tails. The truncated sum P' and P' + eta bracket the true value,
which we confirm by brute-force summation.
"""

import math

from truncprob import BinomialCount, PoissonSum, make_query, verify_against_oracle

query = make_query(
    [
        (BinomialCount(400, 0.3), 90, 150),
        (BinomialCount(250, 0.8), 0, 250),
        (PoissonSum(10, 4.0), 20, math.inf),
    ],
    eta=1e-6,
)

# "massart" alone would be rejected here: it needs [0, 1]-valued terms, and
# the Poisson dimension is not. "best" uses it wherever it applies.
for method in ("chernoff", "best"):
    rep = verify_against_oracle(query, method)
    br = rep.bracket
    print(f"{method:>20}: [{br.p_lower:.12f}, {br.p_upper:.12f}]  oracle {rep.p_oracle:.12f}  "
          f"contained={rep.contained}  terms {br.terms_summed}/{br.terms_full}")
    for r in br.per_dim:
        iv = r.count_interval
        print(f"{'':>22}[{iv.k_lo}, {iv.k_hi}] via {r.method.value}, "
              f"certificates {r.lower_certificate:.2e} / {r.upper_certificate:.2e}")
