import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trplan.distribution import TRParams, cdf
from trplan.plan import (
    DesignQuery,
    SamplingPlan,
    UnsatisfiablePlanError,
    binom_cdf,
    binom_sf,
    failure_prob,
    min_sample_size,
    min_scale_ratio,
    oc_curve,
    oc_value,
    producer_risk,
)
from trplan.tables import ACCEPTANCE_NUMBERS, P_STARS, T_RATIOS


def exact_binom_cdf(c, n, p):
    """Rational-arithmetic oracle; ``p`` is converted exactly from its float."""
    p = Fraction(p)
    return float(sum(math.comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(c + 1)))


def mp_binom_cdf(c, n, p):
    with mpmath.workdps(50):
        p = mpmath.mpf(p)
        return float(mpmath.fsum(mpmath.binomial(n, i) * p**i * (1 - p) ** (n - i) for i in range(c + 1)))


def brute_min_n(p_star, c, p):
    n = c + 1
    while exact_binom_cdf(c, n, p) > 1 - p_star:
        n += 1
    return n


class TestFailureProb:
    def test_matches_distribution_cdf(self):
        # P[T <= t] for T with scale sigma = ratio * sigma0, sigma0 = 1.
        for t, r, lam in [(1.257, 1.0, 0.5), (1.257, 2.0, 0.5), (0.3, 0.7, -0.8)]:
            assert failure_prob(t, r, lam) == pytest.approx(cdf(t, TRParams(r, lam)), rel=1e-14)

    def test_examples(self):
        assert failure_prob(1.257, 1, 0.5) == pytest.approx(0.670101, abs=5e-7)
        assert failure_prob(1.257, 2, 0.5) == pytest.approx(0.2528, abs=5e-5)
        assert failure_prob(0.628, 1, 0.5) == pytest.approx(0.252436, abs=5e-7)

    def test_rayleigh(self):
        assert failure_prob(0.9, 1.3, 0.0) == pytest.approx(1 - math.exp(-0.81 / (2 * 1.69)), rel=1e-14)

    @pytest.mark.parametrize("t, r", [(0, 1), (-1, 1), (1, 0), (1, -2)])
    def test_domain(self, t, r):
        with pytest.raises(ValueError):
            failure_prob(t, r, 0.5)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.05, 5), st.floats(0.2, 20), st.floats(-1, 1))
    def test_monotone(self, t, r, lam):
        p = failure_prob(t, r, lam)
        if p < 1 - 1e-12:
            assert failure_prob(t, r * 1.01, lam) < p
            assert failure_prob(t * 1.01, r, lam) > p


class TestBinomCdf:
    def test_trivial(self):
        assert binom_cdf(9, 9, 0.3) == 1.0
        assert binom_cdf(0, 9, 0.3) == pytest.approx(0.7**9, rel=1e-14)

    def test_table_anchor(self):
        assert binom_cdf(2, 7, 0.2528) == pytest.approx(0.7506, abs=5e-5)

    def test_c_exceeds_n(self):
        with pytest.raises(ValueError):
            binom_cdf(5, 4, 0.2)

    @settings(max_examples=300, deadline=None)
    @given(st.integers(1, 30), st.data(), st.floats(0, 1))
    def test_against_rational_sum(self, n, data, p):
        c = data.draw(st.integers(0, n))
        assert binom_cdf(c, n, p) == pytest.approx(exact_binom_cdf(c, n, p), abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 60), st.data(), st.floats(0, 1))
    def test_sf_complements(self, n, data, p):
        c = data.draw(st.integers(0, n))
        assert binom_cdf(c, n, p) + binom_sf(c, n, p) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("c, n, p", [(500, 1001, 0.5), (30, 5000, 0.01), (2000, 3000, 0.7)])
    def test_incomplete_beta_branch(self, c, n, p):
        # n > 1000 goes through the regularized incomplete beta.
        expected = mp_binom_cdf(c, n, p)
        assert binom_cdf(c, n, p) == pytest.approx(expected, rel=1e-9, abs=1e-15)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 40), st.data(), st.floats(0.01, 0.99))
    def test_monotone_in_p_and_n(self, n, data, p):
        c = data.draw(st.integers(0, n))
        assert binom_cdf(c, n, min(p * 1.05, 1.0)) <= binom_cdf(c, n, p)
        assert binom_cdf(c, n + 1, p) <= binom_cdf(c, n, p)


class TestMinSampleSize:
    @pytest.mark.parametrize(
        "p_star, c, t, n",
        [(0.95, 2, 1.257, 7), (0.95, 2, 0.942, 11), (0.75, 0, 0.628, 5), (0.95, 1, 0.628, 17)],
    )
    def test_published_cells(self, p_star, c, t, n):
        plan = min_sample_size(DesignQuery(p_star, c, t, 0.5))
        assert plan.n == n and plan.c == c and plan.p_star == p_star

    def test_certain_failure(self):
        assert min_sample_size(DesignQuery(0.99, 3, 60.0, 0.5)).n == 4

    def test_underflow_unsatisfiable(self):
        with pytest.raises(UnsatisfiablePlanError):
            min_sample_size(DesignQuery(0.9, 1, 1e-200, 0.5))

    def test_galloping_search(self):
        q = DesignQuery(0.99, 3, 0.05, 0.5)
        plan = min_sample_size(q)
        p = failure_prob(0.05, 1, 0.5)
        assert plan.n > 600
        assert binom_cdf(3, plan.n, p) <= 0.01 < binom_cdf(3, plan.n - 1, p)

    @pytest.mark.parametrize("p_star", P_STARS)
    def test_full_grid_against_brute_force(self, p_star):
        for c in ACCEPTANCE_NUMBERS:
            for t in T_RATIOS:
                p = failure_prob(t, 1.0, 0.5)
                assert min_sample_size(DesignQuery(p_star, c, t, 0.5)).n == brute_min_n(p_star, c, p)

    def test_grid_monotone(self):
        for ps in P_STARS:
            for c in ACCEPTANCE_NUMBERS:
                ns = [min_sample_size(DesignQuery(ps, c, t, 0.5)).n for t in T_RATIOS]
                assert all(a >= b for a, b in zip(ns, ns[1:]))
            for t in T_RATIOS:
                ns = [min_sample_size(DesignQuery(ps, c, t, 0.5)).n for c in ACCEPTANCE_NUMBERS]
                assert all(a <= b for a, b in zip(ns, ns[1:]))

    @pytest.mark.parametrize("kw", [dict(p_star=0), dict(p_star=1), dict(c=-1), dict(t_ratio=0)])
    def test_bad_query(self, kw):
        args = dict(p_star=0.9, c=1, t_ratio=1.0, lam=0.5) | kw
        with pytest.raises(ValueError):
            DesignQuery(**args)


class TestOC:
    def test_published_values(self):
        plan = SamplingPlan(7, 2, 1.257)
        assert oc_value(plan, 4, 0.5) == pytest.approx(0.9898812, abs=1e-6)
        assert oc_value(plan, 2, 0.5) == pytest.approx(0.7506223, abs=1e-6)
        assert producer_risk(plan, 4, 0.5) == pytest.approx(0.01011879, abs=1e-6)
        assert producer_risk(SamplingPlan(12, 2, 0.628), 2, 0.5) == pytest.approx(0.0484904, abs=1e-6)

    def test_accept_all(self):
        assert oc_value(SamplingPlan(4, 4, 2.0), 0.3, 0.5) == 1.0

    def test_curve_monotone(self):
        pts = oc_curve(SamplingPlan(9, 2, 1.257), [0.5, 1, 2, 4, 8, 16], 0.5)
        pa = [p.prob_accept for p in pts]
        pf = [p.p_fail for p in pts]
        assert pa == sorted(pa) and pf == sorted(pf, reverse=True)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 40), st.data(), st.floats(0.1, 5), st.floats(0.2, 20), st.floats(-1, 1))
    def test_risk_complement(self, n, data, t, r, lam):
        plan = SamplingPlan(n, data.draw(st.integers(0, n)), t)
        assert producer_risk(plan, r, lam) + oc_value(plan, r, lam) == 1.0

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 40), st.data(), st.floats(0.1, 5), st.floats(0.2, 20), st.floats(-1, 1))
    def test_oc_nondecreasing_in_ratio(self, n, data, t, r, lam):
        plan = SamplingPlan(n, data.draw(st.integers(0, n)), t)
        assert oc_value(plan, r * 1.1, lam) >= oc_value(plan, r, lam) - 1e-15

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            SamplingPlan(3, 4, 1.0)
        with pytest.raises(ValueError):
            SamplingPlan(0, 0, 1.0)


class TestMinScaleRatio:
    @pytest.mark.parametrize("n, c, t, expected", [(7, 2, 1.257, 2.93), (12, 2, 0.628, 1.99)])
    def test_published(self, n, c, t, expected):
        assert min_scale_ratio(SamplingPlan(n, c, t), 0.5, 0.05) == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("n, c, t", [(7, 2, 1.257), (30, 2, 0.628), (3, 0, 4.712), (71, 10, 0.628)])
    def test_grid_minimality(self, n, c, t):
        plan = SamplingPlan(n, c, t)
        r = min_scale_ratio(plan, 0.5, 0.05)
        assert producer_risk(plan, r, 0.5) <= 0.05
        assert producer_risk(plan, r - 0.01, 0.5) > 0.05

    def test_already_satisfied(self):
        plan = SamplingPlan(5, 4, 0.1)
        assert producer_risk(plan, 1.0, 0.5) <= 0.05
        assert min_scale_ratio(plan, 0.5, 0.05) == 1.0

    @pytest.mark.parametrize("delta", [0, 1, -0.1])
    def test_bad_delta(self, delta):
        with pytest.raises(ValueError):
            min_scale_ratio(SamplingPlan(7, 2, 1.257), 0.5, delta)
