"""Degenerate and near-singular inputs handled through fallback paths."""

import math

import pytest

import oracles
from annurates import (
    PaymentPlan,
    arithmetic_due,
    decreasing_due,
    fixed_rate,
    geometric_aux,
    geometric_due,
    growth_due,
    growth_moments,
    increasing_due,
    increasing_squared_due,
    level_due,
    mean_closed,
    mean_series,
    moment_series,
    second_moment_closed,
    second_moment_series,
    stochastic_rate,
    variance_closed,
    variance_series,
)


class TestZeroInterest:
    """j = 0 has d = 0; every closed form needs its fallback."""

    def test_direct_sums(self):
        rate = fixed_rate(0.0)
        for k in range(0, 25):
            assert level_due(k, rate) == pytest.approx(k, abs=1e-12)
            assert increasing_due(k, rate) == pytest.approx(k * (k + 1) / 2, rel=1e-13, abs=1e-12)
            assert increasing_squared_due(k, rate) == pytest.approx(
                k * (k + 1) * (2 * k + 1) / 6, rel=1e-13, abs=1e-12
            )

    def test_all_families_finite(self):
        rate = fixed_rate(0.0)
        assert math.isfinite(decreasing_due(10, 7, rate))
        assert math.isfinite(arithmetic_due(2.0, 0.5, 9, rate))
        assert math.isfinite(geometric_due(1.0, 1.2, 9, rate))
        assert math.isfinite(growth_due(0.05, 9, rate))

    def test_moments_with_zero_mean_rate(self):
        # operative rates f, r stay positive through s2
        plan = PaymentPlan.arithmetic(1.0, 1.0, 12)
        spec = stochastic_rate(0.0, 0.01)
        mean_r = mean_series(plan, spec)
        second_r = second_moment_series(plan, spec)
        var_r = variance_series(plan, spec)
        for k in (1, 6, 12):
            assert mean_closed(plan, spec, k) == pytest.approx(mean_r[k - 1], rel=1e-10)
            assert second_moment_closed(plan, spec, k) == pytest.approx(
                second_r[k - 1], rel=1e-10
            )
            assert variance_closed(plan, spec, k) == pytest.approx(
                var_r[k - 1], rel=1e-9
            )

    def test_tiny_rate_routes_to_recursion(self):
        # inside the singular band the automatic path must stay exact
        rate = fixed_rate(1e-12)
        assert level_due(20, rate) == pytest.approx(20.0, rel=1e-10)
        assert increasing_squared_due(20, rate) == pytest.approx(2870.0, rel=1e-10)


class TestGeometricRatioSingularity:
    """q = 1+j makes every payment accumulate to the same amount."""

    def test_exact_hit(self):
        rate = fixed_rate(0.1)
        # derived with the rational oracle: 2 * 4 * 1.1^4 = 11.7128
        assert geometric_due(2.0, 1.1, 4, rate) == pytest.approx(11.7128, rel=1e-12)

    def test_limit_formula(self):
        for j in (-0.3, 0.0, 0.07, 0.5):
            rate = fixed_rate(j)
            g = 1.0 + j
            for k in (1, 5, 17):
                assert geometric_due(3.0, g, k, rate) == pytest.approx(
                    3.0 * k * g**k, rel=1e-12
                )

    def test_moments_at_the_singular_ratio(self):
        plan = PaymentPlan.geometric(2.0, 1.1, 8)
        spec = stochastic_rate(0.1, 0.04)
        mean_r = mean_series(plan, spec)
        second_r = second_moment_series(plan, spec)
        for k in (1, 4, 8):
            assert mean_closed(plan, spec, k) == pytest.approx(mean_r[k - 1], rel=1e-10)
            assert second_moment_closed(plan, spec, k) == pytest.approx(
                second_r[k - 1], rel=1e-10
            )

    def test_near_singular_continuity(self):
        rate = fixed_rate(0.1)
        center = geometric_due(1.0, 1.1, 10, rate)
        for bump in (-1e-11, 1e-11):
            assert geometric_due(1.0, 1.1 + bump, 10, rate) == pytest.approx(
                center, rel=1e-7
            )


class TestDeterministicRate:
    """s2 = 0 collapses the stochastic model onto the fixed-rate one."""

    def test_mean_equals_fixed_value(self):
        plan = PaymentPlan.geometric(1.0, 1.2, 10)
        spec = stochastic_rate(0.1, 0.0)
        rate = fixed_rate(0.1)
        for k in (1, 5, 10):
            assert mean_closed(plan, spec, k) == pytest.approx(
                geometric_due(1.0, 1.2, k, rate), rel=1e-11
            )

    def test_second_moment_is_mean_squared(self):
        plan = PaymentPlan.increasing(15)
        spec = stochastic_rate(0.07, 0.0)
        mean_r = mean_series(plan, spec)
        second_r = second_moment_series(plan, spec)
        for k in (1, 8, 15):
            assert second_r[k - 1] == pytest.approx(mean_r[k - 1] ** 2, rel=1e-11)

    def test_variances_vanish_exactly(self):
        for family, p, q in (("arithmetic", 2.0, 0.5), ("geometric", 1.0, 1.05)):
            plan = PaymentPlan(family=family, p=p, q=q, n=30)
            spec = stochastic_rate(0.2, 0.0)
            assert (variance_series(plan, spec) == 0.0).all()
            series = moment_series(plan, spec, "closed")
            assert (series.variance == 0.0).all()


class TestGrowthSingularities:
    def test_growth_at_the_rate_mean(self):
        # u = j gives t = 0: the deflated annuity needs its own fallback
        spec = stochastic_rate(0.1, 0.04)
        aux = geometric_aux(spec, 0.1)
        plan = PaymentPlan.growth(0.1, 12)
        mean_r = mean_series(plan, spec)
        var_r = variance_series(plan, spec)
        for k in (1, 6, 12):
            gm = growth_moments(spec, aux, k)
            assert gm.mean == pytest.approx(mean_r[k - 1], rel=1e-10)
            assert gm.variance == pytest.approx(var_r[k - 1], rel=1e-10)

    def test_negative_auxiliary_rates(self):
        # u large enough drives h and w negative; formulas must not care
        spec = stochastic_rate(0.1, 0.04)
        aux = geometric_aux(spec, 0.2)
        assert aux.h < 0.0 and aux.w < 0.0
        plan = PaymentPlan.growth(0.2, 9)
        var_r = variance_series(plan, spec)
        for k in (3, 9):
            gm = growth_moments(spec, aux, k)
            assert gm.variance == pytest.approx(var_r[k - 1], rel=1e-10)


class TestNegativeRates:
    def test_fixed_values_against_oracle(self):
        from fractions import Fraction

        j = Fraction(-1, 2)
        rate = fixed_rate(float(j))
        for k in range(0, 12):
            want = float(oracles.fixed_value(oracles.increasing_payments(k), j))
            assert increasing_due(k, rate) == pytest.approx(want, rel=1e-11, abs=1e-12)

    def test_moments_with_negative_mean_rate(self):
        plan = PaymentPlan.arithmetic(3.0, -0.25, 8)
        spec = stochastic_rate(-0.05, 0.0025)
        mean_r = mean_series(plan, spec)
        var_r = variance_series(plan, spec)
        for k in (1, 4, 8):
            assert mean_closed(plan, spec, k) == pytest.approx(mean_r[k - 1], rel=1e-10)
            assert variance_closed(plan, spec, k) == pytest.approx(
                var_r[k - 1], rel=1e-9, abs=1e-13
            )


class TestHorizonZero:
    def test_fixed_accumulators(self):
        rate = fixed_rate(0.25)
        assert level_due(0, rate) == 0.0
        assert decreasing_due(3, 0, rate) == 0.0
        assert growth_due(0.1, 0, rate) == 0.0

    def test_zero_is_not_a_payment_year(self):
        # the k = 0 value is an empty product, not a domain error
        for mode in ("auto", "recursive", "sum"):
            assert arithmetic_due(5.0, 1.0, 0, fixed_rate(0.1), mode=mode) == 0.0
