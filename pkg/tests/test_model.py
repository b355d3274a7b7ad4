import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsplan.errors import DomainError
from dsplan.model import (
    AcceptanceLoss,
    CostModel,
    GammaPrior,
    HybridSamplingPlan,
    LamPlan,
    LspPlan,
    RiskReport,
    SamplingPlan,
    estimator_value,
    prior_moment,
)

QUAD = AcceptanceLoss.polynomial((2.0, 2.0, 2.0))


class TestGammaPrior:
    def test_density_is_normalized(self):
        from scipy.integrate import quad

        prior = GammaPrior(2.5, 0.8)
        total, _ = quad(prior.density, 0, np.inf)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_validation(self):
        with pytest.raises(DomainError):
            GammaPrior(0.0, 1.0)
        with pytest.raises(DomainError):
            GammaPrior(1.0, -2.0)

    def test_marginal_quantile_inverts_cdf(self):
        prior = GammaPrior(2.5, 0.8)
        t = prior.marginal_lifetime_quantile(0.99)
        assert prior.marginal_lifetime_cdf(t) == pytest.approx(0.99, abs=1e-12)
        assert t == pytest.approx(0.8 * (0.01 ** (-1.0 / 2.5) - 1.0), rel=1e-12)


class TestPriorMoment:
    def test_mean(self):
        assert prior_moment(GammaPrior(2.0, 1.0), 1.0) == pytest.approx(2.0, rel=1e-14)

    def test_second_moment(self):
        assert prior_moment(GammaPrior(2.5, 0.8), 2.0) == pytest.approx(
            13.671875, rel=1e-13
        )

    def test_zeroth_moment_is_one(self):
        for a, b in [(0.1, 0.2), (2.5, 0.8), (10.0, 3.0)]:
            assert prior_moment(GammaPrior(a, b), 0.0) == 1.0

    def test_accept_all_risk_anchors(self):
        # Published accept-without-inspection risks, exact to 1e-10.
        assert QUAD.prior_expectation(GammaPrior(1.5, 2.0)) == pytest.approx(
            5.3750, abs=1e-10
        )
        assert QUAD.prior_expectation(GammaPrior(2.5, 1.2)) == pytest.approx(
            18.3194, abs=5e-5
        )
        # Full-precision value for the same configuration.
        mu1 = 2.5 / 1.2
        mu2 = 2.5 * 3.5 / 1.2**2
        assert QUAD.prior_expectation(GammaPrior(2.5, 1.2)) == pytest.approx(
            2 + 2 * mu1 + 2 * mu2, rel=1e-13
        )


class TestAcceptanceLoss:
    def test_polynomial_constructor(self):
        loss = AcceptanceLoss.polynomial((1.0, 2.0, 3.0))
        assert loss.exponents == (0.0, 1.0, 2.0)
        assert loss.is_polynomial
        assert loss.degree == 2.0

    def test_non_polynomial(self):
        loss = AcceptanceLoss((0.0, 1.0, 2.5), (2.0, 2.0, 2.0))
        assert not loss.is_polynomial
        assert loss.g(2.0) == pytest.approx(2 + 4 + 2 * 2**2.5, rel=1e-14)

    def test_requires_constant_first(self):
        with pytest.raises(DomainError):
            AcceptanceLoss((1.0, 2.0), (1.0, 1.0))

    def test_requires_increasing_exponents(self):
        with pytest.raises(DomainError):
            AcceptanceLoss((0.0, 2.0, 1.0), (1.0, 1.0, 1.0))

    def test_rejects_negative_loss(self):
        with pytest.raises(DomainError):
            AcceptanceLoss.polynomial((0.0, -5.0, 0.001))

    def test_negative_coefficient_with_positive_loss_allowed(self):
        # g = 4 - 2*lam + lam^2 = (lam-1)^2 + 3 > 0 everywhere.
        loss = AcceptanceLoss.polynomial((4.0, -2.0, 1.0))
        assert float(loss.g(1.0)) == pytest.approx(3.0)


class TestCostModel:
    def test_net_item_cost(self):
        costs = CostModel(0.5, 5.0, 30.0, 0.3)
        assert costs.net_item_cost == pytest.approx(0.2)

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            CostModel(-0.5, 0.0, 30.0)


class TestSamplingPlan:
    def test_no_inspection_constraints(self):
        assert SamplingPlan.accept_all().xi == 0.0
        assert math.isinf(SamplingPlan.reject_all().xi)
        with pytest.raises(DomainError):
            SamplingPlan(0, 0.5, 0.0, 0.0)
        with pytest.raises(DomainError):
            SamplingPlan(0, 0.0, 0.3, 0.0)

    def test_inspection_constraints(self):
        with pytest.raises(DomainError):
            SamplingPlan(2, 0.0, 0.3, 0.5)
        with pytest.raises(DomainError):
            SamplingPlan(2, 0.5, 0.3, 0.0)
        plan = SamplingPlan(3, 0.725, 0.3, 0.355)
        assert plan.estimator_ceiling == pytest.approx(3 * 0.725 / 0.355)

    def test_hybrid_requires_r_in_range(self):
        with pytest.raises(DomainError):
            HybridSamplingPlan(3, 0.5, 0.2, 0.5, 4)
        with pytest.raises(DomainError):
            HybridSamplingPlan(3, 0.5, 0.2, 0.5, 0)
        plan = HybridSamplingPlan(6, 0.2, 0.275, 0.66, 3)
        assert plan.r == 3

    def test_lam_lsp_plan_records(self):
        assert LamPlan(3, 0.5, 0.25).to_record() == {"n": 3, "tau": 0.5, "xi": 0.25}
        assert LspPlan(0, 0.0).to_record() == {"n": 0, "tau": 0.0}
        with pytest.raises(DomainError):
            LspPlan(0, 0.5)


class TestEstimatorValue:
    def test_no_failures(self):
        assert estimator_value([], 4, 1.0, 0.5) == pytest.approx(8.0)

    def test_direct_arithmetic(self):
        assert estimator_value([0.5], 2, 1.0, 1.0) == pytest.approx(0.75)

    def test_hand_computed(self):
        got = estimator_value([0.2, 0.4], 3, 0.725, 0.355)
        assert got == pytest.approx((0.6 + 0.725) / 2.355, rel=1e-12)
        assert got == pytest.approx(0.562633, abs=5e-7)

    def test_rejects_time_beyond_tau(self):
        with pytest.raises(DomainError):
            estimator_value([1.2], 2, 1.0, 0.5)

    @given(
        times=st.lists(st.floats(0.01, 0.99), max_size=5),
        c=st.floats(0.01, 3.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_shrinkage_scaling_identity(self, times, c):
        # For M >= 1 the shrunk estimate is the MLE scaled by M / (M + c).
        m = len(times)
        if m == 0:
            return
        n = m + 2
        shrunk = estimator_value(times, n, 1.0, c)
        mle = (math.fsum(times) + (n - m) * 1.0) / m
        assert shrunk == pytest.approx(mle * m / (m + c), rel=1e-12)


class TestRiskReport:
    def test_mc_consistency_flag(self):
        plan = SamplingPlan(3, 0.725, 0.3, 0.355)
        report = RiskReport(plan, 25.2777)
        assert report.mc_consistent is None
        good = report.with_mc(25.28, 0.01)
        assert good.mc_consistent is True
        bad = report.with_mc(26.0, 0.01)
        assert bad.mc_consistent is False

    def test_record_round_trip(self):
        plan = HybridSamplingPlan(6, 0.2, 0.275, 0.66, 3)
        rec = RiskReport(plan, 26.0338).to_record()
        assert rec["r"] == 3 and rec["n"] == 6
        assert rec["risk"] == pytest.approx(26.0338)
