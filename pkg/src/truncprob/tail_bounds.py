"""Chernoff-type tail bounds on the average scale X = K / n.

The Chernoff bound function is ``C(z) = inf_t E[exp(t (X - z))]``. For the two
built-in families it has a closed form (:func:`hoeffding_C`,
:func:`poisson_C`); :func:`generic_C` computes it from the per-term CGF by
golden-section search. :func:`massart_M` and :func:`massart_tail` give the
sharper Massart rate for averages of [0, 1]-valued terms.

Every ``log_*`` helper returns the natural log of the matching bound, which
is what the truncation search works with.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .distributions import BinomialCount, PoissonSum, mean_avg_scale, per_term_cgf
from .errors import DomainError

__all__ = [
    "Side",
    "BoundMethod",
    "TailBound",
    "hoeffding_C",
    "log_hoeffding_C",
    "poisson_C",
    "log_poisson_C",
    "generic_C",
    "log_generic_C",
    "massart_M",
    "massart_tail",
    "golden_section_min",
    "tail_bound",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
T_CAP = 700.0
GOLDEN_RTOL = 1e-12


class Side(str, enum.Enum):
    LOWER = "lower"
    UPPER = "upper"


class BoundMethod(str, enum.Enum):
    HOEFFDING = "hoeffding"
    POISSON_CHERNOFF = "poisson_chernoff"
    GENERIC_CGF = "generic_cgf"
    MASSART = "massart"


@dataclass(frozen=True)
class TailBound:
    """A proved upper bound on ``Pr{X <= z}`` (lower) or ``Pr{X >= z}`` (upper)."""

    value: float
    side: Side
    z: float
    method: BoundMethod


def _xlog_ratio(x, a):
    """``x * log(a / x)`` with the ``0 * log(.) = 0`` convention."""
    if x == 0.0:
        return 0.0
    return x * math.log(a / x)


def log_hoeffding_C(p, n, z):
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"z must lie in [0, 1], got {z!r}", "z")
    return n * (_xlog_ratio(z, p) + _xlog_ratio(1.0 - z, 1.0 - p))


def hoeffding_C(p, n, z):
    """Closed-form Chernoff bound for an average of ``n`` Bernoulli(p) terms.

    ``[(p/z)^z ((1-p)/(1-z))^(1-z)]^n``, so ``C(0) = (1-p)^n`` and
    ``C(1) = p^n``.
    """
    return math.exp(log_hoeffding_C(p, n, z))


def log_poisson_C(lam, n, z):
    if not z >= 0.0:
        raise DomainError(f"z must be non-negative, got {z!r}", "z")
    return n * (-lam + z + _xlog_ratio(z, lam))


def poisson_C(lam, n, z):
    """Closed-form Chernoff bound for an average of ``n`` Poisson(lam) terms.

    ``[exp(-lam) (lam e / z)^z]^n``, with ``C(0) = exp(-n lam)``.
    """
    return math.exp(log_poisson_C(lam, n, z))


def golden_section_min(f, lo, hi, rtol=GOLDEN_RTOL, max_iter=200):
    """Minimise a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x))`` for the best point evaluated, endpoints included.
    """
    best_x, best_f = lo, f(lo)
    f_hi = f(hi)
    if f_hi < best_f:
        best_x, best_f = hi, f_hi
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if abs(b - a) <= rtol * max(1.0, abs(a), abs(b)):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    for x, fx in ((x1, f1), (x2, f2)):
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def _support_hull(dist):
    if isinstance(dist, BinomialCount):
        return 0.0, 1.0
    return 0.0, math.inf


def log_generic_C(dist, z):
    """``log C(z)`` from the per-term CGF; ``-inf`` past the support hull."""
    z = float(z)
    mu = mean_avg_scale(dist)
    if z == mu:
        raise DomainError("C(z) is only used for z != mean", "z")
    lo_hull, hi_hull = _support_hull(dist)
    if z < lo_hull or z > hi_hull:
        return -math.inf

    sign = 1.0 if z > mu else -1.0

    def objective(s):
        # s >= 0 is |t|; t takes the sign that can push below 1
        t = sign * s
        return per_term_cgf(dist, t) - t * z

    hi = 1.0
    f_hi = objective(hi)
    while hi < T_CAP:
        f_next = objective(min(2.0 * hi, T_CAP))
        if f_next > f_hi:
            break
        hi, f_hi = min(2.0 * hi, T_CAP), f_next
    lo = hi / 2.0 if hi > 1.0 else 0.0
    upper = min(2.0 * hi, T_CAP)
    _, f_best = golden_section_min(objective, lo, upper)
    return dist.n * min(f_best, 0.0)


def generic_C(dist, z):
    """Chernoff bound function ``inf_t E[exp(t (X - z))]`` for ``X = K / n``.

    The per-term objective ``K_Y(t) - t z`` is convex; it is minimised over
    ``t > 0`` when ``z`` is above the mean and ``t < 0`` below it. The value at
    the best ``t`` found is returned, so an imperfect search can only make
    the bound looser, never invalid.

    Outside the support hull (``z > 1`` for a binomial, ``z < 0`` for either
    family) the tail probability is zero and so is the infimum.
    """
    return math.exp(log_generic_C(dist, z))


def _check_mu(mu):
    if not 0.0 < mu < 1.0:
        raise DomainError(f"mu must lie in (0, 1), got {mu!r}", "mu")


def massart_M(z, mu):
    """Massart exponent ``-(mu - z)^2 / (2 s (1 - s))`` with ``s = (2 mu + z) / 3``.

    Defined for ``-2 mu < z < 3 - 2 mu``; it is 0 at ``z = mu`` and tends to
    ``-inf`` at both ends.
    """
    _check_mu(mu)
    if not -2.0 * mu < z < 3.0 - 2.0 * mu:
        raise DomainError(f"z must lie in ({-2 * mu}, {3 - 2 * mu}), got {z!r}", "z")
    s = (2.0 * mu + z) / 3.0
    return -((mu - z) ** 2) / (2.0 * s * (1.0 - s))


def massart_tail(n, mu, z, side):
    """Strict bound ``exp(n M(z, mu))`` on a tail of an average of [0, 1] terms."""
    _check_mu(mu)
    side = Side(side)
    if side is Side.UPPER and not mu < z < 3.0 - 2.0 * mu:
        raise DomainError(f"upper tail needs z in ({mu}, {3 - 2 * mu}), got {z!r}", "z")
    if side is Side.LOWER and not -2.0 * mu < z < mu:
        raise DomainError(f"lower tail needs z in ({-2 * mu}, {mu}), got {z!r}", "z")
    return math.exp(n * massart_M(z, mu))


def log_massart_bound(n, mu, z):
    """``n M(z, mu)`` extended by ``-inf`` beyond either end of its domain."""
    if z <= -2.0 * mu or z >= 3.0 - 2.0 * mu:
        return -math.inf
    return n * massart_M(z, mu)


def log_closed_form_C(dist, z):
    """Family closed form of ``log C(z)``, ``-inf`` past the support hull."""
    if isinstance(dist, BinomialCount):
        if z < 0.0 or z > 1.0:
            return -math.inf
        return log_hoeffding_C(dist.p, dist.n, z)
    if z < 0.0:
        return -math.inf
    return log_poisson_C(dist.lam, dist.n, z)


def tail_bound(dist, z, method=None):
    """Bound the tail of ``K / n`` beyond ``z`` on the side away from the mean."""
    mu = mean_avg_scale(dist)
    if z == mu:
        raise DomainError("z must differ from the mean", "z")
    side = Side.UPPER if z > mu else Side.LOWER
    if method is None:
        method = (BoundMethod.HOEFFDING if isinstance(dist, BinomialCount)
                  else BoundMethod.POISSON_CHERNOFF)
    method = BoundMethod(method)
    if method is BoundMethod.HOEFFDING:
        if not isinstance(dist, BinomialCount):
            raise DomainError("hoeffding bound needs a binomial count", "method")
        value = math.exp(log_closed_form_C(dist, z))
    elif method is BoundMethod.POISSON_CHERNOFF:
        if not isinstance(dist, PoissonSum):
            raise DomainError("poisson bound needs a Poisson sum", "method")
        value = math.exp(log_closed_form_C(dist, z))
    elif method is BoundMethod.GENERIC_CGF:
        value = generic_C(dist, z)
    else:
        if not isinstance(dist, BinomialCount):
            raise DomainError("massart bound needs [0, 1]-valued terms", "method")
        value = math.exp(log_massart_bound(dist.n, mu, z))
    return TailBound(min(value, 1.0), side, float(z), method)
