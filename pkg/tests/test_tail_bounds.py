import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from truncprob.distributions import BinomialCount, PoissonSum
from truncprob.errors import DomainError
from truncprob.tail_bounds import (
    BoundMethod,
    Side,
    generic_C,
    golden_section_min,
    hoeffding_C,
    log_generic_C,
    log_hoeffding_C,
    massart_M,
    massart_tail,
    poisson_C,
    tail_bound,
)


def log_upper_tail(dist, z):
    """log Pr{K/n >= z} from scipy's survival functions."""
    k = math.ceil(dist.n * z - 1e-12)
    if isinstance(dist, BinomialCount):
        return stats.binom.logsf(k - 1, dist.n, dist.p)
    return stats.poisson.logsf(k - 1, dist.n * dist.lam)


def log_lower_tail(dist, z):
    """log Pr{K/n <= z}."""
    k = math.floor(dist.n * z + 1e-12)
    if k < 0:
        return -math.inf
    if isinstance(dist, BinomialCount):
        return stats.binom.logcdf(k, dist.n, dist.p)
    return stats.poisson.logcdf(k, dist.n * dist.lam)


class TestHoeffding:
    def test_at_mean(self):
        assert hoeffding_C(0.5, 10, 0.5) == 1.0

    def test_endpoint_limits(self):
        assert hoeffding_C(0.5, 1, 1.0) == 0.5
        assert hoeffding_C(0.3, 4, 0.0) == pytest.approx(0.7**4, rel=1e-14)
        assert hoeffding_C(0.3, 4, 1.0) == pytest.approx(0.3**4, rel=1e-14)

    def test_golden(self):
        # mpmath, 50 digits
        assert hoeffding_C(0.5, 100, 0.75) == pytest.approx(2.08403717880714308e-6, rel=1e-12)
        exact = stats.binom.sf(74, 100, 0.5)
        assert exact == pytest.approx(2.8181410171027013278e-7, rel=1e-10)
        assert exact <= hoeffding_C(0.5, 100, 0.75)

    @pytest.mark.parametrize("z", [-0.01, 1.01])
    def test_domain(self, z):
        with pytest.raises(DomainError):
            hoeffding_C(0.5, 3, z)


class TestPoisson:
    def test_at_mean(self):
        assert poisson_C(1.0, 1, 1.0) == 1.0

    def test_zero_limit(self):
        assert poisson_C(2.0, 3, 0.0) == pytest.approx(math.exp(-6.0), rel=1e-15)

    def test_golden(self):
        assert poisson_C(1.0, 1, 2.0) == pytest.approx(0.67957045711476130884, rel=1e-14)
        assert 1 - 2 * math.exp(-1) <= poisson_C(1.0, 1, 2.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            poisson_C(1.0, 1, -0.5)


class TestGeneric:
    def test_matches_hoeffding(self):
        assert generic_C(BinomialCount(100, 0.5), 0.75) == pytest.approx(hoeffding_C(0.5, 100, 0.75), rel=1e-9)

    def test_matches_poisson(self):
        assert generic_C(PoissonSum(1, 1.0), 2.0) == pytest.approx(poisson_C(1.0, 1, 2.0), rel=1e-9)

    def test_mean_excluded(self):
        with pytest.raises(DomainError):
            generic_C(BinomialCount(10, 0.5), 0.5)

    def test_outside_support_hull(self):
        assert generic_C(BinomialCount(10, 0.5), 1.2) == 0.0
        assert generic_C(BinomialCount(10, 0.5), -0.2) == 0.0
        assert generic_C(PoissonSum(3, 0.5), -0.1) == 0.0

    def test_support_edge(self):
        assert generic_C(BinomialCount(5, 0.4), 1.0) == pytest.approx(0.4**5, rel=1e-12)
        assert generic_C(PoissonSum(3, 0.5), 0.0) == pytest.approx(math.exp(-1.5), rel=1e-12)

    @given(n=st.integers(1, 300), p=st.floats(0.02, 0.98), z=st.floats(0.0, 1.0))
    @settings(max_examples=150, deadline=None)
    def test_dominates_exact_binomial(self, n, p, z):
        dist = BinomialCount(n, p)
        if abs(z - p) < 1e-9:
            return
        log_c = log_generic_C(dist, z)
        exact = log_upper_tail(dist, z) if z > p else log_lower_tail(dist, z)
        assert exact <= log_c + 1e-9
        assert exact <= log_hoeffding_C(p, n, z) + 1e-9

    @given(n=st.integers(1, 50), lam=st.floats(0.05, 10.0), ratio=st.floats(0.0, 4.0))
    @settings(max_examples=150, deadline=None)
    def test_dominates_exact_poisson(self, n, lam, ratio):
        z = lam * ratio
        if abs(z - lam) < 1e-9:
            return
        dist = PoissonSum(n, lam)
        exact = log_upper_tail(dist, z) if z > lam else log_lower_tail(dist, z)
        assert exact <= log_generic_C(dist, z) + 1e-9
        assert exact <= n * (-lam + z + (z * math.log(lam / z) if z > 0 else 0.0)) + 1e-9

    @pytest.mark.parametrize("dist", [BinomialCount(40, 0.3), PoissonSum(5, 2.0)])
    def test_monotone_in_distance(self, dist):
        mu = dist.p if isinstance(dist, BinomialCount) else dist.lam
        for sign in (1.0, -1.0):
            span = (1 - mu if sign > 0 else mu) if isinstance(dist, BinomialCount) else (3 * mu if sign > 0 else mu)
            vals = [generic_C(dist, mu + sign * d) for d in np.linspace(1e-3, span, 200)]
            assert all(b <= a for a, b in zip(vals, vals[1:]))

    def test_limits(self):
        dist = BinomialCount(50, 0.5)
        assert generic_C(dist, 0.5 + 1e-8) >= 1 - 1e-6
        assert generic_C(dist, 0.5 - 1e-8) >= 1 - 1e-6
        assert generic_C(dist, 1.0) <= 1e-6
        assert generic_C(dist, 0.0) <= 1e-6


class TestGoldenSection:
    def test_quadratic(self):
        x, fx = golden_section_min(lambda t: (t - 1.3) ** 2, 0.0, 4.0)
        assert x == pytest.approx(1.3, abs=1e-6)
        assert fx <= 1e-12

    def test_endpoint_minimum(self):
        x, fx = golden_section_min(lambda t: t, 2.0, 5.0)
        assert x == 2.0 and fx == 2.0


class TestMassart:
    def test_zero_at_mean(self):
        assert massart_M(0.3, 0.3) == 0.0

    def test_endpoint_values(self):
        assert massart_M(1.0, 0.5) == pytest.approx(-0.5625, rel=1e-15)
        assert massart_M(0.0, 0.5) == pytest.approx(-0.5625, rel=1e-15)

    @pytest.mark.parametrize("mu", [0.01, 0.2, 0.5, 0.77, 0.99])
    def test_closed_endpoint_forms(self, mu):
        assert massart_M(1.0, mu) == pytest.approx(9 * (mu - 1) / (4 * (2 * mu + 1)), rel=1e-13)
        assert massart_M(0.0, mu) == pytest.approx(9 * mu / (4 * (2 * mu - 3)), rel=1e-13)

    @pytest.mark.parametrize("z", [-1.0, 2.0])
    def test_domain(self, z):
        with pytest.raises(DomainError):
            massart_M(z, 0.5)

    @pytest.mark.parametrize("mu", [0.05, 0.3, 0.5, 0.8])
    def test_unimodal(self, mu):
        lo = np.linspace(-2 * mu, mu, 202)[1:-1]
        hi = np.linspace(mu, 3 - 2 * mu, 202)[1:-1]
        m_lo = [massart_M(z, mu) for z in lo]
        m_hi = [massart_M(z, mu) for z in hi]
        assert all(b > a for a, b in zip(m_lo, m_lo[1:]))
        assert all(b < a for a, b in zip(m_hi, m_hi[1:]))
        assert max(m_lo + m_hi) < 0.0

    def test_tail_values(self):
        assert massart_tail(10, 0.5, 1.0, Side.UPPER) == pytest.approx(0.0036065631360157305555, rel=1e-13)
        assert 2.0**-10 < massart_tail(10, 0.5, 1.0, "upper")
        assert massart_tail(1, 0.5, 0.5 + 1e-9, "upper") == pytest.approx(1.0, abs=1e-12)
        bound = massart_tail(100, 0.3, 0.5, "upper")
        assert bound == pytest.approx(0.00018182966942343457459, rel=1e-12)
        assert stats.binom.sf(49, 100, 0.3) < bound

    def test_wrong_side(self):
        with pytest.raises(DomainError):
            massart_tail(10, 0.5, 0.4, "upper")
        with pytest.raises(DomainError):
            massart_tail(10, 0.5, 0.6, "lower")

    def test_endpoint_inequalities(self):
        for mu in np.linspace(0.01, 0.99, 99):
            assert math.log(mu) < massart_M(1.0, mu)
            assert math.log1p(-mu) < massart_M(0.0, mu)


class TestTailBound:
    def test_record(self):
        tb = tail_bound(BinomialCount(100, 0.5), 0.75)
        assert tb.side is Side.UPPER and tb.method is BoundMethod.HOEFFDING
        assert tb.value == hoeffding_C(0.5, 100, 0.75)

    def test_lower_generic(self):
        tb = tail_bound(PoissonSum(2, 3.0), 1.0, "generic_cgf")
        assert tb.side is Side.LOWER and 0.0 <= tb.value <= 1.0

    def test_massart_needs_bounded_terms(self):
        with pytest.raises(DomainError):
            tail_bound(PoissonSum(2, 3.0), 5.0, "massart")
