import math

import numpy as np
import pytest

from dsplan.dsp_risk import (
    acceptance_probability,
    dsp_risk_type1,
    lam_risk_grid,
    lam_risk_type1,
    mixture_terms,
    risk_grid_type1,
)
from dsplan.errors import DomainError
from dsplan.model import (
    AcceptanceLoss,
    CostModel,
    GammaPrior,
    SamplingPlan,
    prior_moment,
)
from dsplan.simulate import acceptance_frequency, mc_bayes_risk

QUAD = AcceptanceLoss.polynomial((2.0, 2.0, 2.0))
CUBIC = AcceptanceLoss.polynomial((2.0, 2.0, 2.0, 2.0))
POWER52 = AcceptanceLoss((0.0, 1.0, 2.5), (2.0, 2.0, 2.0))
BASE = CostModel(0.5, 0.5, 30.0)


class TestMixtureTerms:
    def test_count_and_conventions(self):
        n, tau, xi, c, b = 3, 0.725, 0.3, 0.355, 0.8
        terms = mixture_terms(n, tau, xi, c, b)
        assert len(terms) == sum(m + 1 for m in range(1, n + 1))
        for t in terms:
            assert t.shift == pytest.approx((n - t.m + t.j) * tau / (t.m + c))
            assert t.scale == pytest.approx(b + (n - t.m + t.j) * tau)
            if xi <= t.shift:
                assert t.beta_arg == 0.0
            else:
                cstar = (t.m + c) * (xi - t.shift) / t.scale
                assert t.beta_arg == pytest.approx(cstar / (1.0 + cstar), rel=1e-12)
            assert t.sign == (-1) ** t.j

    def test_infinite_threshold_saturates(self):
        for t in mixture_terms(2, 0.5, math.inf, 0.4, 0.8):
            assert t.beta_arg == 1.0


class TestDspRiskType1:
    def test_published_quadratic_row(self):
        report = dsp_risk_type1(
            SamplingPlan(3, 0.7250, 0.3000, 0.3550), GammaPrior(2.5, 0.8), BASE, QUAD
        )
        assert report.risk == pytest.approx(25.2777, abs=5e-4)

    def test_published_cubic_row(self):
        report = dsp_risk_type1(
            SamplingPlan(2, 0.8875, 0.3500, 1.4875), GammaPrior(0.1, 0.2), BASE, CUBIC
        )
        assert report.risk == pytest.approx(7.4606, abs=5e-4)

    def test_published_power_row(self):
        report = dsp_risk_type1(
            SamplingPlan(2, 0.6125, 0.2250, 1.6750), GammaPrior(0.1, 0.2), BASE, POWER52
        )
        assert report.risk == pytest.approx(6.6966, abs=5e-4)

    def test_accept_all_is_prior_loss(self):
        prior = GammaPrior(2.5, 0.8)
        report = dsp_risk_type1(SamplingPlan.accept_all(), prior, BASE, QUAD)
        assert report.risk == pytest.approx(QUAD.prior_expectation(prior), rel=1e-14)

    def test_reject_all_is_rejection_cost(self):
        report = dsp_risk_type1(
            SamplingPlan.reject_all(), GammaPrior(2.5, 0.8), BASE, QUAD
        )
        assert report.risk == 30.0

    def test_risk_limits_in_xi(self):
        # xi -> 0: base costs plus the prior loss; far threshold: base + C_r.
        prior = GammaPrior(2.5, 0.8)
        n, tau, c = 3, 0.5, 0.5
        lo = dsp_risk_type1(SamplingPlan(n, tau, 1e-300, c), prior, BASE, QUAD).risk
        base = n * 0.5 + tau * 0.5
        assert lo == pytest.approx(base + QUAD.prior_expectation(prior), abs=1e-9)
        hi = dsp_risk_type1(SamplingPlan(n, tau, 1e9, c), prior, BASE, QUAD).risk
        assert hi == pytest.approx(base + 30.0, abs=1e-9)
        exact_inf = dsp_risk_type1(SamplingPlan(n, tau, math.inf, c), prior, BASE, QUAD).risk
        assert exact_inf == pytest.approx(base + 30.0, abs=1e-9)

    def test_discontinuity_only_at_estimator_ceiling(self):
        prior = GammaPrior(2.5, 0.8)
        plan = SamplingPlan(3, 0.5, 0.25, 0.5)
        ceiling = plan.estimator_ceiling
        eps = 1e-7
        below = dsp_risk_type1(SamplingPlan(3, 0.5, ceiling - eps, 0.5), prior, BASE, QUAD).risk
        at = dsp_risk_type1(SamplingPlan(3, 0.5, ceiling, 0.5), prior, BASE, QUAD).risk
        above = dsp_risk_type1(SamplingPlan(3, 0.5, ceiling + eps, 0.5), prior, BASE, QUAD).risk
        # Continuous from the left (the atom rejects only strictly below xi),
        # jumps as soon as xi exceeds the ceiling.
        assert at == pytest.approx(below, abs=1e-5)
        assert above - at > 1e-4  # the no-failure atom switches to rejection
        # Elsewhere the risk is continuous in xi.
        r1 = dsp_risk_type1(SamplingPlan(3, 0.5, 0.3, 0.5), prior, BASE, QUAD).risk
        r2 = dsp_risk_type1(SamplingPlan(3, 0.5, 0.3 + eps, 0.5), prior, BASE, QUAD).risk
        assert r2 == pytest.approx(r1, abs=1e-5)

    def test_mc_oracle_agreement(self):
        prior = GammaPrior(2.5, 0.8)
        plan = SamplingPlan(3, 0.5, 0.25, 0.5)
        exact = dsp_risk_type1(plan, prior, BASE, QUAD).risk
        mc = mc_bayes_risk("dsp", plan, prior, BASE, QUAD, 1_000_000, seed=101)
        assert abs(exact - mc.estimate) <= 3.0 * mc.se

    def test_vectorized_path_matches_scalar(self):
        prior = GammaPrior(2.5, 0.8)
        xi = np.array([0.1, 0.25, 0.3, 0.7, 1.5])
        cs = np.array([0.05, 0.355, 0.9, 1.7])
        for n, tau in [(1, 0.3), (3, 0.725), (5, 1.1)]:
            grid = risk_grid_type1(n, tau, xi, cs, prior, BASE, QUAD)
            for i, x in enumerate(xi):
                for j, c in enumerate(cs):
                    scalar = dsp_risk_type1(
                        SamplingPlan(n, tau, float(x), float(c)), prior, BASE, QUAD
                    ).risk
                    assert grid[i, j] == pytest.approx(scalar, abs=1e-11)

    def test_general_exponent_path_matches_quadratic(self):
        # The quadratic loss is the exponent list (0, 1, 2); both spellings
        # must agree to full precision.
        prior = GammaPrior(2.5, 0.8)
        plan = SamplingPlan(3, 0.725, 0.3, 0.355)
        as_poly = dsp_risk_type1(plan, prior, BASE, QUAD).risk
        as_terms = dsp_risk_type1(
            plan, prior, BASE, AcceptanceLoss((0, 1, 2), (2, 2, 2))
        ).risk
        assert as_terms == as_poly


class TestLamRiskType1:
    def test_published_rows(self):
        # abs tolerance 1e-3 per the reproduction criterion; the first row's
        # published coordinates are rounded harder than the others.
        cases = [
            (4, 0.0270, 0.1080, GammaPrior(0.2, 0.2), 12.1499, 1e-3),
            (1, 0.7978, 0.7978, GammaPrior(2.5, 0.4), 29.7506, 5e-4),
        ]
        costs = CostModel(0.5, 0.0, 30.0)
        for n, tau, xi, prior, ref, tol in cases:
            report = lam_risk_type1(n, tau, xi, prior, costs, QUAD)
            assert report.risk == pytest.approx(ref, abs=tol)

    def test_zero_threshold_accepts_always(self):
        prior = GammaPrior(2.5, 0.8)
        costs = CostModel(0.5, 0.0, 30.0)
        report = lam_risk_type1(3, 0.6, 0.0, prior, costs, QUAD)
        assert report.risk == pytest.approx(
            3 * 0.5 + QUAD.prior_expectation(prior), rel=1e-12
        )

    def test_matches_mc(self):
        prior = GammaPrior(1.5, 0.8)
        costs = CostModel(0.5, 0.0, 30.0)
        exact = lam_risk_type1(3, 0.5262, 0.2631, prior, costs, QUAD).risk
        mc = mc_bayes_risk(
            "lam", SamplingPlan(3, 0.5262, 0.2631, 1.0), prior, costs, QUAD,
            1_000_000, seed=55,
        )
        assert abs(exact - mc.estimate) <= 3.0 * mc.se

    def test_grid_matches_scalar(self):
        prior = GammaPrior(2.0, 0.8)
        costs = CostModel(0.5, 0.0, 30.0)
        xi = np.array([0.05, 0.3026, 0.61, 1.9])
        grid = lam_risk_grid(3, 0.6051, xi, prior, costs, QUAD)
        for i, x in enumerate(xi):
            scalar = lam_risk_type1(3, 0.6051, float(x), prior, costs, QUAD).risk
            assert grid[i] == pytest.approx(scalar, abs=1e-11)


class TestAcceptanceProbability:
    def test_zero_threshold_certain(self):
        plan = SamplingPlan(3, 0.725, 0.0, 0.355)
        assert acceptance_probability(plan, 1.0) == 1.0

    def test_threshold_beyond_ceiling_impossible(self):
        plan = SamplingPlan(3, 0.725, 0.3, 0.355)
        beyond = SamplingPlan(3, 0.725, plan.estimator_ceiling * 1.01, 0.355)
        assert acceptance_probability(beyond, 1.0) == pytest.approx(0.0, abs=1e-9)

    def test_nonincreasing_in_xi(self):
        lam = 1.3
        values = [
            acceptance_probability(SamplingPlan(4, 0.6, xi, 0.5), lam)
            for xi in np.linspace(1e-3, 5.0, 40)
        ]
        assert all(a >= b - 1e-10 for a, b in zip(values, values[1:]))

    def test_matches_empirical_frequency(self):
        plan = SamplingPlan(3, 0.7250, 0.3000, 0.3550)
        for lam in (0.4, 1.0, 2.7):
            p = acceptance_probability(plan, lam)
            freq = acceptance_frequency(plan, lam, 1_000_000, seed=2024)
            se = math.sqrt(max(p * (1 - p), 1e-12) / 1_000_000)
            assert abs(p - freq) <= 3.0 * se

    def test_rejects_bad_rate(self):
        with pytest.raises(DomainError):
            acceptance_probability(SamplingPlan(3, 0.725, 0.3, 0.355), 0.0)


class TestRiskXiMonotonicityLink:
    def test_risk_interpolates_between_limits(self):
        # With acceptance probability falling in xi, the risk moves from the
        # accept-all level toward base + C_r monotonically for this config.
        prior = GammaPrior(2.5, 0.8)
        risks = [
            dsp_risk_type1(SamplingPlan(3, 0.725, xi, 0.355), prior, BASE, QUAD).risk
            for xi in [1e-6, 0.1, 0.3, 0.8, 2.0, 6.2, 1e9]
        ]
        lo = 3 * 0.5 + 0.725 * 0.5 + QUAD.prior_expectation(prior)
        hi = 3 * 0.5 + 0.725 * 0.5 + 30.0
        assert risks[0] == pytest.approx(lo, abs=1e-9)
        assert risks[-1] == pytest.approx(hi, abs=1e-9)
        assert all(lo - 1e-9 <= r <= hi + 1e-9 for r in risks)
