"""Count-valued distributions: log-PMF, moments, per-term CGF, and the
brute-force summation oracle.

Two families are supported. ``BinomialCount`` is the number of successes in
``n`` Bernoulli(p) trials; ``PoissonSum`` is the sum of ``n`` i.i.d.
Poisson(lam) terms, i.e. Poisson(n * lam). Both are also read on the average
scale X = K / n, whose mean is ``p`` or ``lam`` respectively.

Log-PMFs use Loader's saddle-point decomposition (``stirlerr`` + ``bd0``)
rather than differencing log-gamma values, which loses about
``log10(n)`` digits for large ``n``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, ResourceError

__all__ = [
    "BinomialCount",
    "PoissonSum",
    "DiscreteDist",
    "CountInterval",
    "Dimension",
    "BoxQuery",
    "log_pmf",
    "log_pmf_array",
    "mean_avg_scale",
    "per_term_cgf",
    "interval_mass",
    "poisson_cutoff",
    "oracle_ranges",
    "full_sum_oracle",
    "default_term_cap",
    "make_query",
]

DEFAULT_TERM_CAP = 10**8
ORACLE_TAIL_TOL = 1e-15
_CHUNK = 1 << 20
_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class BinomialCount:
    """Number of successes in ``n`` independent Bernoulli(``p``) trials."""

    n: int
    p: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}", "n")
        object.__setattr__(self, "n", int(self.n))
        p = float(self.p)
        if not 0.0 < p < 1.0:
            raise DomainError(f"p must lie strictly in (0, 1), got {self.p!r}", "p")
        object.__setattr__(self, "p", p)

    @property
    def family(self):
        return "binomial"

    @property
    def support_max(self):
        return self.n


@dataclass(frozen=True)
class PoissonSum:
    """Sum of ``n`` i.i.d. Poisson(``lam``) terms."""

    n: int
    lam: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}", "n")
        object.__setattr__(self, "n", int(self.n))
        lam = float(self.lam)
        if not (lam > 0.0 and math.isfinite(lam)):
            raise DomainError(f"lambda must be positive and finite, got {self.lam!r}", "lambda")
        object.__setattr__(self, "lam", lam)

    @property
    def family(self):
        return "poisson_sum"

    @property
    def support_max(self):
        return math.inf


DiscreteDist = Union[BinomialCount, PoissonSum]


@dataclass(frozen=True)
class CountInterval:
    """Closed integer interval ``[k_lo, k_hi]``; ``k_hi`` may be ``math.inf``.

    An interval with ``k_lo > k_hi`` is empty; use :meth:`empty` to build the
    canonical marker.
    """

    k_lo: int
    k_hi: Union[int, float]

    def __post_init__(self):
        if self.k_lo > self.k_hi:
            object.__setattr__(self, "k_lo", 0)
            object.__setattr__(self, "k_hi", -1)

    @classmethod
    def empty(cls):
        return cls(0, -1)

    @property
    def is_empty(self):
        return self.k_lo > self.k_hi

    @property
    def size(self):
        if self.is_empty:
            return 0
        if self.k_hi == math.inf:
            return math.inf
        return int(self.k_hi) - self.k_lo + 1

    def intersect(self, lo, hi):
        """Clip to ``[lo, hi]``, returning the empty marker when disjoint."""
        if self.is_empty:
            return self
        k_lo = max(self.k_lo, lo)
        k_hi = min(self.k_hi, hi)
        if k_lo > k_hi:
            return CountInterval.empty()
        if k_hi != math.inf:
            k_hi = int(k_hi)
        return CountInterval(int(k_lo), k_hi)

    def contains(self, other):
        if other.is_empty:
            return True
        if self.is_empty:
            return False
        return self.k_lo <= other.k_lo and other.k_hi <= self.k_hi


@dataclass(frozen=True)
class Dimension:
    """One coordinate of a box query: ``a <= K <= b`` for ``K ~ dist``."""

    dist: DiscreteDist
    a: int
    b: Union[int, float]

    def __post_init__(self):
        if int(self.a) != self.a:
            raise DomainError(f"a must be an integer, got {self.a!r}", "a")
        object.__setattr__(self, "a", int(self.a))
        if self.b != math.inf:
            if int(self.b) != self.b:
                raise DomainError(f"b must be an integer or inf, got {self.b!r}", "b")
            object.__setattr__(self, "b", int(self.b))
        if self.a > self.b:
            raise DomainError(f"need a <= b, got a={self.a}, b={self.b}", "a")

    def support_interval(self):
        """Query bounds clipped to the support of ``dist``."""
        return CountInterval(self.a, self.b).intersect(0, self.dist.support_max)


@dataclass(frozen=True)
class BoxQuery:
    """Box event over independent dimensions with total error budget ``eta``."""

    dims: tuple
    eta: float

    def __post_init__(self):
        dims = tuple(self.dims)
        if not dims:
            raise DomainError("a query needs at least one dimension", "dimensions")
        object.__setattr__(self, "dims", dims)
        eta = float(self.eta)
        if not 0.0 < eta < 1.0:
            raise DomainError(f"eta must lie in (0, 1), got {self.eta!r}", "eta")
        object.__setattr__(self, "eta", eta)

    @property
    def m(self):
        return len(self.dims)


def mean_avg_scale(dist):
    """Mean of the average-scale variable K / n."""
    if isinstance(dist, BinomialCount):
        return dist.p
    return dist.lam


# --- log-PMF ---------------------------------------------------------------

# Loader (2000), "Fast and accurate computation of binomial probabilities".
_S0 = 1.0 / 12.0
_S1 = 1.0 / 360.0
_S2 = 1.0 / 1260.0
_S3 = 1.0 / 1680.0
_S4 = 1.0 / 1188.0


def _stirlerr(x):
    """log(x!) - log(sqrt(2 pi x) (x/e)^x) for integer-valued x >= 1."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x <= 15.0
    if np.any(small):
        xs = x[small]
        out[small] = gammaln(xs + 1.0) - (xs + 0.5) * np.log(xs) + xs - _LN_SQRT_2PI
    big = ~small
    if np.any(big):
        xb = x[big]
        xx = xb * xb
        out[big] = (_S0 - (_S1 - (_S2 - (_S3 - _S4 / xx) / xx) / xx) / xx) / xb
    return out


def _bd0(x, m):
    """Deviance term x log(x/m) + m - x, accurate when x is close to m."""
    x = np.asarray(x, dtype=float)
    m = np.broadcast_to(np.asarray(m, dtype=float), x.shape)
    out = np.empty_like(x)
    d = x - m
    near = np.abs(d) < 0.1 * (x + m)
    far = ~near
    if np.any(far):
        xf, mf = x[far], m[far]
        out[far] = xf * np.log(xf / mf) + mf - xf
    if np.any(near):
        xn, mn, dn = x[near], m[near], d[near]
        v = dn / (xn + mn)
        s = dn * v
        ej = 2.0 * xn * v
        v2 = v * v
        # |v| < 0.1 so the series converges in well under 20 steps
        for j in range(1, 40):
            ej = ej * v2
            s_new = s + ej / (2 * j + 1)
            if np.array_equal(s_new, s):
                break
            s = s_new
        out[near] = s
    return out


def _binom_log_pmf(n, p, k):
    k = np.asarray(k, dtype=float)
    q = 1.0 - p
    out = np.empty_like(k)
    lo = k == 0
    hi = k == n
    mid = ~(lo | hi)
    out[lo] = n * math.log1p(-p)
    out[hi] = n * math.log(p)
    if np.any(mid):
        km = k[mid]
        nk = n - km
        lc = (_stirlerr(np.full_like(km, n)) - _stirlerr(km) - _stirlerr(nk)
              - _bd0(km, n * p) - _bd0(nk, n * q))
        lf = math.log(2.0 * math.pi) + np.log(km) + np.log1p(-km / n)
        out[mid] = lc - 0.5 * lf
    return out


def _poisson_log_pmf(mean, k):
    k = np.asarray(k, dtype=float)
    out = np.empty_like(k)
    zero = k == 0
    out[zero] = -mean
    pos = ~zero
    if np.any(pos):
        kp = k[pos]
        out[pos] = -_stirlerr(kp) - _bd0(kp, mean) - 0.5 * np.log(2.0 * math.pi * kp)
    return out


def log_pmf_array(dist, ks):
    """Vectorised ``log Pr{K = k}``; every entry of ``ks`` must be in support."""
    ks = np.asarray(ks)
    if ks.size and (ks.min() < 0 or ks.max() > dist.support_max):
        raise DomainError("k outside the support", "k")
    if isinstance(dist, BinomialCount):
        return _binom_log_pmf(dist.n, dist.p, ks)
    return _poisson_log_pmf(dist.n * dist.lam, ks)


def log_pmf(dist, k):
    """Natural log of ``Pr{K = k}``.

    >>> log_pmf(BinomialCount(2, 0.5), 1)  # doctest: +ELLIPSIS
    -0.693147...
    """
    if int(k) != k or k < 0 or k > dist.support_max:
        raise DomainError(f"k={k!r} is outside the support", "k")
    return float(log_pmf_array(dist, np.array([int(k)]))[0])


def per_term_cgf(dist, t):
    """Cumulant generating function ``log E[exp(t Y)]`` of a single term Y.

    Y is Bernoulli(p) for ``BinomialCount`` and Poisson(lam) for
    ``PoissonSum``. The Bernoulli form is evaluated as a log-sum-exp so it
    stays finite for any finite ``t``; the Poisson CGF grows like ``e^t`` and
    returns ``inf`` once that overflows.
    """
    t = float(t)
    if not math.isfinite(t):
        raise DomainError(f"t must be finite, got {t!r}", "t")
    if t == 0.0:
        return 0.0
    if isinstance(dist, BinomialCount):
        p = dist.p
        return float(np.logaddexp(math.log1p(-p), math.log(p) + t))
    if t > 709.0:
        return math.inf
    return dist.lam * math.expm1(t)


# --- summation ---------------------------------------------------------------


def _chunks(lo, hi):
    start = lo
    while start <= hi:
        stop = min(hi, start + _CHUNK - 1)
        yield start, stop
        start = stop + 1


def interval_mass(dist, interval):
    """``Pr{k_lo <= K <= k_hi}`` by direct summation over a finite interval.

    Terms are evaluated independently of the interval and accumulated with
    :func:`math.fsum`, which is correctly rounded. Hence the result does not
    depend on summation order, and a sub-interval never sums to more than
    its parent interval.
    """
    if interval.is_empty:
        return 0.0
    if interval.k_hi == math.inf:
        raise DomainError("cannot sum an unbounded interval", "b")
    lo = max(int(interval.k_lo), 0)
    hi = min(interval.k_hi, dist.support_max)
    if lo > hi:
        return 0.0
    hi = int(hi)

    def terms():
        for a, b in _chunks(lo, hi):
            ks = np.arange(a, b + 1, dtype=float)
            yield from np.exp(log_pmf_array(dist, ks)).tolist()

    return min(1.0, math.fsum(terms()))


def poisson_cutoff(dist, tol=ORACLE_TAIL_TOL):
    """Smallest ``k`` such that ``Pr{K >= k}`` is provably below ``tol``.

    The certificate is the Chernoff bound for a Poisson(n lam) count; the
    offset above the mean is doubled until the bound clears ``tol``, then
    narrowed by bisection. Returns ``(k, bound)``.
    """
    mean = dist.n * dist.lam

    def log_tail(k):
        # Pr{K >= k} <= exp(-mean) (e mean / k)^k for k > mean
        return -mean + k + k * math.log(mean / k)

    log_tol = math.log(tol)
    base = math.floor(mean) + 1
    step = 1
    while log_tail(base + step) >= log_tol:
        step *= 2
    lo, hi = base + step // 2, base + step
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if log_tail(mid) < log_tol:
            hi = mid
        else:
            lo = mid
    if log_tail(lo) < log_tol:
        hi = lo
    return hi, math.exp(log_tail(hi))


def oracle_ranges(query):
    """Finite summation range per dimension for the brute-force oracle.

    Returns a list of ``(CountInterval, neglected_tail_bound)``. Only a
    Poisson dimension with an infinite (or beyond-cutoff) upper bound has a
    non-zero neglected tail.
    """
    out = []
    for dim in query.dims:
        iv = dim.support_interval()
        tail = 0.0
        if isinstance(dim.dist, PoissonSum) and not iv.is_empty:
            cut, bound = poisson_cutoff(dim.dist)
            if iv.k_hi >= cut:
                iv = iv.intersect(iv.k_lo, cut - 1)
                tail = bound
        out.append((iv, tail))
    return out


def default_term_cap():
    """Oracle term cap, overridable via ``TRUNCPROB_TERM_CAP``."""
    raw = os.environ.get("TRUNCPROB_TERM_CAP")
    if raw is None:
        return DEFAULT_TERM_CAP
    try:
        cap = int(float(raw))
    except ValueError:
        raise DomainError(f"TRUNCPROB_TERM_CAP is not a number: {raw!r}", "TRUNCPROB_TERM_CAP")
    if cap < 1:
        raise DomainError("TRUNCPROB_TERM_CAP must be positive", "TRUNCPROB_TERM_CAP")
    return cap


def full_sum_oracle(query, term_cap=None):
    """Box probability by summing every term of every dimension.

    Dimensions are assumed independent, so the result is the ordered product
    of per-dimension masses. Raises :class:`ResourceError` when the total
    number of terms exceeds ``term_cap`` (default :func:`default_term_cap`).
    """
    if term_cap is None:
        term_cap = default_term_cap()
    ranges = oracle_ranges(query)
    total = sum(iv.size for iv, _ in ranges)
    if total > term_cap:
        raise ResourceError(f"oracle needs {total} terms, cap is {term_cap}")
    prob = 1.0
    for dim, (iv, _) in zip(query.dims, ranges):
        prob *= interval_mass(dim.dist, iv)
    return prob


def _iter_dims(dims: Iterable) -> tuple:
    return tuple(d if isinstance(d, Dimension) else Dimension(*d) for d in dims)


def make_query(dims, eta):
    """Build a :class:`BoxQuery` from ``Dimension`` objects or ``(dist, a, b)`` tuples."""
    return BoxQuery(_iter_dims(dims), eta)
