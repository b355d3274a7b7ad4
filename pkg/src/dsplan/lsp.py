"""The competing Bayesian sampling plan: posterior-threshold decision rule
and its closed-form Bayes risk for polynomial acceptance losses.

At failure count m with total time on test y, the posterior expected
acceptance loss is

    phi(m, y) = sum_l a_l * Gamma(m + a + p_l) / (Gamma(m + a) * (y + b)^p_l),

strictly decreasing in y whenever some higher coefficient is positive.  The
rule accepts when phi(m, y) <= C_r, equivalently when y clears a per-count
threshold.  Thresholds are found by monotone bisection for every loss shape
(closed-form root formulas exist only through degree four and serve as test
oracles); the closed-form risk below additionally requires integer
exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import special as _sp

from .errors import DomainError, UnsupportedLossError
from .model import (
    AcceptanceLoss,
    CostModel,
    GammaPrior,
    LspPlan,
    RiskReport,
)
from .numerics import CompensatedSum, find_monotone_root, log_binom, log_gamma, reg_inc_beta

__all__ = [
    "LspThresholds",
    "posterior_expected_loss",
    "lsp_threshold",
    "lsp_decision",
    "lsp_risk_type1",
    "lsp_risk_tau_grid",
]

ALWAYS_ACCEPT = -math.inf
ALWAYS_REJECT = math.inf


def posterior_expected_loss(
    m: int, y: float, prior: GammaPrior, loss: AcceptanceLoss
) -> float:
    """E[g(lam) | m failures, total time on test y] under the conjugate
    posterior Gamma(m + a, y + b); valid for arbitrary real exponents."""
    if m < 0 or y < 0:
        raise DomainError(f"require m >= 0 and y >= 0, got m={m}, y={y}")
    ma = m + prior.a
    yb = y + prior.b
    return math.fsum(
        cf * math.exp(log_gamma(ma + p) - log_gamma(ma) - p * math.log(yb))
        for p, cf in zip(loss.exponents, loss.coefficients)
    )


def lsp_threshold(
    m: int,
    prior: GammaPrior,
    loss: AcceptanceLoss,
    rejection_cost: float,
    tol: float = 1e-12,
) -> float:
    """Acceptance threshold on y for failure count m.

    Returns the root y* of phi(m, y) = C_r (so the rule accepts iff
    y >= y*), ``ALWAYS_ACCEPT`` (-inf) when even y = 0 clears the bar, and
    ``ALWAYS_REJECT`` (+inf) when the loss floor a_0 already meets or
    exceeds C_r so the bar is never cleared.
    """
    if any(cf < 0 for cf in loss.coefficients[1:]):
        raise DomainError("threshold monotonicity requires nonnegative higher coefficients")
    if posterior_expected_loss(m, 0.0, prior, loss) <= rejection_cost:
        return ALWAYS_ACCEPT
    if loss.coefficients[0] >= rejection_cost:
        return ALWAYS_REJECT
    hi = prior.b
    while posterior_expected_loss(m, hi, prior, loss) > rejection_cost:
        hi *= 2.0
    root = find_monotone_root(
        lambda y: posterior_expected_loss(m, y, prior, loss),
        rejection_cost,
        0.0,
        hi,
        tol=tol * max(1.0, hi),
    )
    if root is None:  # pragma: no cover - excluded by the sentinel checks
        raise DomainError("threshold bracket failed to straddle the rejection cost")
    return root


@dataclass(frozen=True)
class LspThresholds:
    """Per-failure-count acceptance thresholds on total time on test for a
    sample of size n (sentinels mark counts that always accept/reject)."""

    n: int
    levels: Tuple[float, ...]

    @classmethod
    def compute(
        cls,
        n: int,
        prior: GammaPrior,
        loss: AcceptanceLoss,
        rejection_cost: float,
        tol: float = 1e-12,
    ) -> "LspThresholds":
        return cls(
            n=n,
            levels=tuple(
                lsp_threshold(m, prior, loss, rejection_cost, tol=tol)
                for m in range(n + 1)
            ),
        )

    def accepts(self, m: int, y: float) -> bool:
        return lsp_decision(m, y, self)


def lsp_decision(m: int, y: float, thresholds: LspThresholds) -> bool:
    """Accept (True) iff the total time on test reaches the threshold for
    the observed failure count; the boundary accepts."""
    if not 0 <= m <= thresholds.n:
        raise DomainError(f"failure count {m} outside 0..{thresholds.n}")
    level = thresholds.levels[m]
    if level == ALWAYS_ACCEPT:
        return True
    if level == ALWAYS_REJECT:
        return False
    return y >= level


def _require_polynomial(loss: AcceptanceLoss) -> None:
    if not loss.is_polynomial:
        raise UnsupportedLossError(
            "the closed-form Bayesian-plan risk requires integer loss exponents; "
            f"got {loss.exponents}"
        )


def lsp_risk_type1(
    n: int,
    tau: float,
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    thresholds: LspThresholds | None = None,
) -> RiskReport:
    """Exact Bayes risk of the posterior-threshold rule at (n, tau).

    The rejection mass splits by failure count: counts whose threshold is
    unreachable contribute their full probability, counts with a reachable
    threshold contribute truncated-sum terms weighted by non-regularized
    incomplete beta factors.
    """
    _require_polynomial(loss)
    a, b = prior.a, prior.b
    if n == 0:
        plan = LspPlan(0, 0.0)
        if posterior_expected_loss(0, 0.0, prior, loss) <= costs.rejection_cost:
            return RiskReport(plan, loss.prior_expectation(prior))
        return RiskReport(plan, costs.rejection_cost)
    if tau <= 0:
        raise DomainError(f"censoring time must be positive, got {tau}")
    if thresholds is None:
        thresholds = LspThresholds.compute(n, prior, loss, costs.rejection_cost)
    consts = [costs.rejection_cost - loss.coefficients[0]] + [
        -cf for cf in loss.coefficients[1:]
    ]
    pref = a * math.log(b) - log_gamma(a)
    base = (
        n * costs.sampling_cost + tau * costs.time_cost + loss.prior_expectation(prior)
    )
    acc = CompensatedSum()
    # No-failure block: y = n*tau deterministically.
    if not lsp_decision(0, n * tau, thresholds):
        for p, c_l in zip(loss.exponents, consts):
            acc.add(
                c_l * math.exp(pref + log_gamma(a + p) - (a + p) * math.log(n * tau + b))
            )
    for m in range(1, n + 1):
        level = thresholds.levels[m]
        if level == ALWAYS_ACCEPT:
            continue
        sigma = level - (n - m) * tau
        if sigma <= 0.0:
            continue
        if sigma > m * tau:
            # Rejection is certain at this count: full probability weight.
            for j in range(0, m + 1):
                lw = log_binom(n, m) + log_binom(m, j)
                sign = -1 if j % 2 else 1
                A = b + (n - m + j) * tau
                for p, c_l in zip(loss.exponents, consts):
                    acc.add(
                        sign
                        * c_l
                        * math.exp(pref + lw + log_gamma(a + p) - (a + p) * math.log(A))
                    )
        else:
            # Partial rejection: j runs to the largest whole step below
            # sigma/tau (guarded against an exact-multiple tie).
            lstar = min(m, int(math.floor(sigma / tau * (1.0 + 1e-15))))
            for j in range(0, lstar + 1):
                t = sigma - j * tau
                if t <= 0.0:
                    continue
                A = b + (n - m + j) * tau
                yarg = t / (A + t)
                lw = log_binom(n, m) + log_binom(m, j) - log_gamma(m)
                sign = -1 if j % 2 else 1
                for p, c_l in zip(loss.exponents, consts):
                    apl = a + p
                    # Non-regularized incomplete beta via the regularized
                    # routine times exp(log Beta) to dodge overflow.
                    lbeta = log_gamma(m) + log_gamma(apl) - log_gamma(m + apl)
                    by = reg_inc_beta(yarg, m, apl) * math.exp(lbeta)
                    acc.add(
                        sign
                        * c_l
                        * math.exp(pref + lw + log_gamma(m + apl) - apl * math.log(A))
                        * by
                    )
    ratio = acc.warn_if_ill_conditioned("lsp_risk_type1")
    return RiskReport(LspPlan(n, tau), base + acc.value, cancellation_ratio=ratio)


def lsp_risk_tau_grid(
    n: int,
    tau_grid: np.ndarray,
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    thresholds: LspThresholds | None = None,
) -> np.ndarray:
    """Vectorized counterpart of :func:`lsp_risk_type1` over a tau grid at
    fixed n >= 1 (thresholds do not depend on tau)."""
    _require_polynomial(loss)
    if n < 1:
        raise DomainError("lsp_risk_tau_grid requires n >= 1")
    taus = np.asarray(tau_grid, dtype=float)
    a, b = prior.a, prior.b
    if thresholds is None:
        thresholds = LspThresholds.compute(n, prior, loss, costs.rejection_cost)
    consts = [costs.rejection_cost - loss.coefficients[0]] + [
        -cf for cf in loss.coefficients[1:]
    ]
    pref = a * math.log(b) - log_gamma(a)
    out = np.zeros_like(taus)
    level0 = thresholds.levels[0]
    reject0 = (
        np.zeros_like(taus, dtype=bool)
        if level0 == ALWAYS_ACCEPT
        else (n * taus < level0)
    )
    if reject0.any():
        block = sum(
            c_l * np.exp(pref + log_gamma(a + p) - (a + p) * np.log(n * taus + b))
            for p, c_l in zip(loss.exponents, consts)
        )
        out += np.where(reject0, block, 0.0)
    for m in range(1, n + 1):
        level = thresholds.levels[m]
        if level == ALWAYS_ACCEPT:
            continue
        sigma = level - (n - m) * taus
        certain = sigma > m * taus
        partial = (sigma > 0.0) & ~certain
        for j in range(0, m + 1):
            A = b + (n - m + j) * taus
            lw = log_binom(n, m) + log_binom(m, j)
            sign = -1.0 if j % 2 else 1.0
            if certain.any():
                block = sum(
                    c_l * np.exp(pref + lw + log_gamma(a + p) - (a + p) * np.log(A))
                    for p, c_l in zip(loss.exponents, consts)
                )
                out += np.where(certain, sign * block, 0.0)
            t = sigma - j * taus
            live = partial & (t > 0.0)
            if live.any():
                yarg = np.where(live, t / (A + t), 0.0)
                block = np.zeros_like(taus)
                for p, c_l in zip(loss.exponents, consts):
                    apl = a + p
                    lbeta = log_gamma(m) + log_gamma(apl) - log_gamma(m + apl)
                    by = _sp.betainc(m, apl, yarg) * math.exp(lbeta)
                    block += c_l * np.exp(
                        pref + lw - log_gamma(m) + log_gamma(m + apl) - apl * np.log(A)
                    ) * by
                out += np.where(live, sign * block, 0.0)
    return (
        n * costs.sampling_cost
        + taus * costs.time_cost
        + loss.prior_expectation(prior)
        + out
    )
