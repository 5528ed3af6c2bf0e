"""Turn tail budgets into truncation intervals.

A dimension whose lower and upper tails are bounded by ``alpha`` and ``beta``
can have its summation range cut to ``[k_lo, k_hi]`` while losing at most
``alpha + beta`` probability. Across ``m`` dimensions the losses add
(Bonferroni), so splitting a total budget ``eta`` as ``eta / (2m)`` per tail
keeps the box probability within ``eta`` of the truncated sum.

Two ways of finding cut points are provided: bisection on a Chernoff bound
(any family) and the closed-form Massart quantiles (binomial only).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .distributions import (
    BinomialCount,
    BoxQuery,
    CountInterval,
    Dimension,
    PoissonSum,
    mean_avg_scale,
)
from .errors import ConsistencyError, DomainError, UnsupportedMethodError
from .tail_bounds import Side, log_closed_form_C, log_massart_bound

__all__ = [
    "Method",
    "TailBudget",
    "TruncationResult",
    "BoxQuery",
    "Dimension",
    "allocate_budget",
    "find_truncation_point",
    "massart_quantile",
    "binomial_truncation_closed_form",
    "binomial_truncation_direct",
    "truncate_dimension",
    "truncate_box",
]

BRACKET_SEED = 2.0 ** -20
ROOT_TOL = 2.0 ** -44


class Method(str, enum.Enum):
    CHERNOFF = "bisection_chernoff"
    MASSART = "massart_closed_form"
    BEST = "best"

    @classmethod
    def parse(cls, value):
        """Accept enum members, canonical values or the short CLI names."""
        if isinstance(value, cls):
            return value
        aliases = {"chernoff": cls.CHERNOFF, "massart": cls.MASSART}
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise DomainError(f"unknown method {value!r}", "method") from None


@dataclass(frozen=True)
class TailBudget:
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise DomainError(f"{name} must lie in (0, 1), got {v!r}", name)


@dataclass(frozen=True)
class TruncationResult:
    """Cut points for one dimension.

    ``u`` and ``v`` are on the average scale. ``count_interval`` is the
    retained count range after clipping to the query bounds and the support.
    ``lower_certificate`` bounds ``Pr{K/n <= u}``, ``upper_certificate`` bounds
    ``Pr{K/n >= v}``; both are evaluated at the outermost discarded integer.
    """

    u: float
    v: float
    count_interval: CountInterval
    lower_certificate: float
    upper_certificate: float
    method: Method
    budget: TailBudget


def allocate_budget(eta, m):
    """Split ``eta`` evenly: ``alpha_i = beta_i = eta / (2m)``."""
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must lie in (0, 1), got {eta!r}", "eta")
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}", "m")
    share = eta / (2 * m)
    return [TailBudget(share, share) for _ in range(int(m))]


def _default_log_bound(dist):
    return lambda z: log_closed_form_C(dist, z)


def find_truncation_point(dist, budget_side, side, log_bound=None):
    """Cut point on the average scale whose tail bound is at most ``budget_side``.

    Searches ``z = mu -/+ delta`` by doubling ``delta`` from 2**-20 until the
    bound drops to the budget, then bisecting. The returned point is always
    the end of the final bracket that satisfies the bound, so
    ``exp(log_bound(z)) <= budget_side`` holds for the value returned.

    ``log_bound`` maps ``z`` to the log of a tail bound that decreases away
    from the mean; it defaults to the family's closed-form Chernoff bound.
    """
    if not 0.0 < budget_side < 1.0:
        raise DomainError(f"budget must lie in (0, 1), got {budget_side!r}", "budget")
    side = Side(side)
    mu = mean_avg_scale(dist)
    if log_bound is None:
        log_bound = _default_log_bound(dist)
    target = math.log(budget_side)
    sign = 1.0 if side is Side.UPPER else -1.0

    def point(delta):
        return mu + sign * delta

    lo, hi = 0.0, BRACKET_SEED
    while log_bound(point(hi)) > target:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise ConsistencyError("tail bound does not decay; no cut point found")
    while hi - lo > ROOT_TOL:
        mid = 0.5 * (lo + hi)
        z_mid = point(mid)
        if z_mid == point(lo) or z_mid == point(hi):
            break
        if log_bound(z_mid) > target:
            lo = mid
        else:
            hi = mid
    return point(hi)


def massart_quantile(n, p, eta_half, side):
    """Root of ``exp(n M(z, p)) = eta_half`` on the requested side of ``p``.

    The equation is quadratic in ``z``; with ``L = log(1 / eta_half)``::

        z = p + (1 - 2p -/+ sqrt(1 + 18 n p (1-p) / L)) / (2/3 + 3n / L)
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p!r}", "p")
    if not 0.0 < eta_half < 1.0:
        raise DomainError(f"eta_half must lie in (0, 1), got {eta_half!r}", "eta")
    side = Side(side)
    L = -math.log(eta_half)
    root = math.sqrt(1.0 + 18.0 * n * p * (1.0 - p) / L)
    denom = 2.0 / 3.0 + 3.0 * n / L
    if side is Side.LOWER:
        z = p + (1.0 - 2.0 * p - root) / denom
        if not -2.0 * p < z < p:
            raise ConsistencyError(f"lower Massart quantile {z} outside ({-2 * p}, {p})")
    else:
        z = p + (1.0 - 2.0 * p + root) / denom
        if not p < z < 3.0 - 2.0 * p:
            raise ConsistencyError(f"upper Massart quantile {z} outside ({p}, {3 - 2 * p})")
    return z


def _closed_form_counts(n, p, eta):
    z1 = massart_quantile(n, p, eta / 2.0, Side.LOWER)
    z2 = massart_quantile(n, p, eta / 2.0, Side.UPPER)
    return z1, z2, math.ceil(n * z1), math.floor(n * z2)


def binomial_truncation_closed_form(n, p, eta, a, b):
    """Massart truncation ``[max(a, ceil(n z1)), min(b, floor(n z2))]``.

    Each discarded tail has probability below ``eta / 2``. The result is also
    clipped to the support ``[0, n]``; an empty marker is returned when
    nothing survives.
    """
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must lie in (0, 1), got {eta!r}", "eta")
    if a > b:
        raise DomainError(f"need a <= b, got a={a}, b={b}", "a")
    _, _, t_lo, t_hi = _closed_form_counts(n, p, eta)
    return CountInterval(t_lo, t_hi).intersect(a, b).intersect(0, n)


def binomial_truncation_direct(n, p, eta, a, b):
    """Same interval, written directly on the count scale.

    ``n p + (1 - 2p -/+ sqrt(1 + 18 n p (1-p) / L)) / (2 / (3n) + 3 / L)``
    with ``L = log(2 / eta)``. Kept as an independent transcription to check
    :func:`binomial_truncation_closed_form` against.
    """
    L = math.log(2.0 / eta)
    root = math.sqrt(1.0 + 18.0 * n * p * (1.0 - p) / L)
    denom = 2.0 / (3.0 * n) + 3.0 / L
    t_lo = max(a, math.ceil(n * p + (1.0 - 2.0 * p - root) / denom))
    t_hi = min(b, math.floor(n * p + (1.0 - 2.0 * p + root) / denom))
    return CountInterval(t_lo, t_hi).intersect(0, n)


def _first_above(n, u):
    """Smallest integer k with k > n u, computed exactly."""
    return math.floor(Fraction(u) * n) + 1


def _last_below(n, v):
    """Largest integer k with k < n v, computed exactly."""
    return math.ceil(Fraction(v) * n) - 1


def _certificates(dist, log_bound, k_lo, k_hi):
    """Bounds on the discarded tails ``K < k_lo`` and ``K > k_hi``."""
    n = dist.n
    lower = 0.0
    if k_lo - 1 >= 0:
        lower = math.exp(log_bound((k_lo - 1) / n))
    upper = 0.0
    if k_hi + 1 <= dist.support_max:
        upper = math.exp(log_bound((k_hi + 1) / n))
    return min(lower, 1.0), min(upper, 1.0)


def _chernoff_result(dim, budget):
    dist = dim.dist
    log_bound = _default_log_bound(dist)
    u = find_truncation_point(dist, budget.alpha, Side.LOWER, log_bound)
    v = find_truncation_point(dist, budget.beta, Side.UPPER, log_bound)
    k_lo, k_hi = _first_above(dist.n, u), _last_below(dist.n, v)
    lower, upper = _certificates(dist, log_bound, k_lo, k_hi)
    iv = CountInterval(k_lo, k_hi).intersect(dim.a, dim.b).intersect(0, dist.support_max)
    return TruncationResult(u, v, iv, lower, upper, Method.CHERNOFF, budget)


def _massart_result(dim, budget):
    dist = dim.dist
    if not isinstance(dist, BinomialCount):
        raise UnsupportedMethodError(
            "unsupported method: massart_closed_form needs a binomial count", "method")
    # one eta_i = alpha + beta with eta_i / 2 per tail; equal budgets make this exact
    eta_i = budget.alpha + budget.beta
    n, p = dist.n, dist.p
    z1, z2, k_lo, k_hi = _closed_form_counts(n, p, eta_i)
    lower, upper = _certificates(dist, lambda z: log_massart_bound(n, p, z), k_lo, k_hi)
    iv = CountInterval(k_lo, k_hi).intersect(dim.a, dim.b).intersect(0, n)
    return TruncationResult(z1, z2, iv, lower, upper, Method.MASSART, budget)


def truncate_dimension(dim, budget, method=Method.BEST):
    """Truncate one dimension under ``budget`` with the requested method."""
    method = Method.parse(method)
    if method is Method.CHERNOFF:
        return _chernoff_result(dim, budget)
    if method is Method.MASSART:
        return _massart_result(dim, budget)
    chern = _chernoff_result(dim, budget)
    if isinstance(dim.dist, PoissonSum):
        return chern
    mass = _massart_result(dim, budget)
    # ties go to the closed form
    return mass if mass.count_interval.size <= chern.count_interval.size else chern


def truncate_box(query, method=Method.BEST):
    """Per-dimension truncation results for ``query`` under ``eta / (2m)`` budgets."""
    method = Method.parse(method)
    budgets = allocate_budget(query.eta, query.m)
    return [truncate_dimension(dim, bud, method) for dim, bud in zip(query.dims, budgets)]
