"""Exact Bayes risk of the shrinkage-estimator plan under Type-I censoring.

The risk of a plan (n, tau, xi, c) decomposes into the deterministic costs,
the prior expectation of the acceptance loss, and an alternating
binomial-mixture sum weighted by regularized incomplete beta factors.  The
same machinery evaluates the historical MLE-based rule (``lam_risk_type1``,
the c = 0 limit with a discrete mass at n*tau instead of n*tau/c) and the
per-rate acceptance probability.

The scalar entry points run through compensated summation and report a
cancellation diagnostic; ``risk_grid_type1`` is the vectorized counterpart
used by the grid optimizer and agrees with the scalar path to ~1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy import special as _sp

from .errors import DomainError
from .model import (
    AcceptanceLoss,
    CostModel,
    GammaPrior,
    LamPlan,
    RiskReport,
    SamplingPlan,
    prior_moment,
)
from .numerics import CompensatedSum, gamma_cdf, log_binom, log_gamma, reg_inc_beta

__all__ = [
    "MixtureTerm",
    "mixture_terms",
    "dsp_risk_type1",
    "lam_risk_type1",
    "acceptance_probability",
    "risk_grid_type1",
    "lam_risk_grid",
]


@dataclass(frozen=True)
class MixtureTerm:
    """One (m, j) term of the estimator's continuous mixture part.

    ``shift`` is the term's location tau_{j;m,c} = (n-m+j)*tau/(m+c),
    ``scale`` the constant C_{j,m} = b + (n-m+j)*tau, and ``beta_arg`` the
    incomplete-beta argument S*_{j,m,c}, clamped to 0 whenever the threshold
    xi lies at or below the shift (the shifted gamma density vanishes there).
    """

    m: int
    j: int
    shift: float
    scale: float
    beta_arg: float
    sign: int
    log_weight: float


def _beta_arg(xi: float, shift: float, scale: float, m_plus_c: float) -> float:
    if math.isinf(xi):
        return 1.0
    w = m_plus_c * (xi - shift)
    if w <= 0.0:
        return 0.0
    return w / (w + scale)


def mixture_terms(
    n: int, tau: float, xi: float, c: float, b: float
) -> List[MixtureTerm]:
    """All (m, j) mixture terms of a plan against a prior scale b.

    ``c = 0`` yields the MLE-based rule's terms (divisor m alone).
    """
    if n < 1:
        raise DomainError("mixture terms require n >= 1")
    terms: List[MixtureTerm] = []
    for m in range(1, n + 1):
        mc = m + c
        for j in range(0, m + 1):
            k = n - m + j
            shift = k * tau / mc
            scale = b + k * tau
            terms.append(
                MixtureTerm(
                    m=m,
                    j=j,
                    shift=shift,
                    scale=scale,
                    beta_arg=_beta_arg(xi, shift, scale, mc),
                    sign=-1 if j % 2 else 1,
                    log_weight=log_binom(n, m) + log_binom(m, j),
                )
            )
    return terms


def _loss_constants(costs: CostModel, loss: AcceptanceLoss) -> List[float]:
    # C_0 = C_r - a_0 for the constant term, C_l = -a_l beyond it.
    return [costs.rejection_cost - loss.coefficients[0]] + [
        -cf for cf in loss.coefficients[1:]
    ]


def _bracket_risk(
    terms: Sequence[MixtureTerm],
    discrete_indicator: bool,
    n: int,
    tau: float,
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
) -> CompensatedSum:
    """Accumulate sum_l C_l * (prior-weighted rejection mass) over all terms."""
    a, b = prior.a, prior.b
    pref = a * math.log(b) - log_gamma(a)
    acc = CompensatedSum()
    for p, c_l in zip(loss.exponents, _loss_constants(costs, loss)):
        if c_l == 0.0:
            continue
        apl = a + p
        lg = log_gamma(apl)
        if discrete_indicator:
            acc.add(c_l * math.exp(pref + lg - apl * math.log(b + n * tau)))
        for t in terms:
            if t.beta_arg == 0.0:
                continue
            inc = reg_inc_beta(t.beta_arg, t.m, apl)
            if inc == 0.0:
                continue
            acc.add(
                t.sign
                * c_l
                * math.exp(pref + t.log_weight + lg - apl * math.log(t.scale))
                * inc
            )
    return acc


def dsp_risk_type1(
    plan: SamplingPlan,
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
) -> RiskReport:
    """Exact Bayes risk of a Type-I censored plan for an arbitrary
    exponent-list acceptance loss."""
    if plan.n == 0:
        risk = (
            costs.rejection_cost
            if math.isinf(plan.xi)
            else loss.prior_expectation(prior)
        )
        return RiskReport(plan, risk)
    base = (
        plan.n * costs.sampling_cost
        + plan.tau * costs.time_cost
        + loss.prior_expectation(prior)
    )
    terms = mixture_terms(plan.n, plan.tau, plan.xi, plan.c, prior.b)
    # The atom at n*tau/c rejects only when it falls strictly below xi.
    acc = _bracket_risk(
        terms, plan.estimator_ceiling < plan.xi, plan.n, plan.tau, prior, costs, loss
    )
    ratio = acc.warn_if_ill_conditioned("dsp_risk_type1")
    return RiskReport(plan, base + acc.value, cancellation_ratio=ratio)


def lam_risk_type1(
    n: int,
    tau: float,
    xi: float,
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
) -> RiskReport:
    """Exact Bayes risk of the MLE-based rule: the c = 0 mixture with the
    no-failure mass at n*tau."""
    plan = LamPlan(n, tau, xi)
    base = (
        n * costs.sampling_cost + tau * costs.time_cost + loss.prior_expectation(prior)
    )
    terms = mixture_terms(n, tau, xi, 0.0, prior.b)
    acc = _bracket_risk(terms, n * tau < xi, n, tau, prior, costs, loss)
    ratio = acc.warn_if_ill_conditioned("lam_risk_type1")
    return RiskReport(plan, base + acc.value, cancellation_ratio=ratio)


def acceptance_probability(plan: SamplingPlan, lam: float) -> float:
    """P(accept | rate lam) for an inspection plan.

    Combines the no-failure atom (accepted when n*tau/c >= xi) with the
    term-wise complemented shifted-gamma CDFs of the continuous mixture.
    The alternating-sum identity is applied as printed, without clamping xi
    against the estimator ceiling; the identity cancels any mass beyond it.
    """
    if plan.n < 1:
        raise DomainError("acceptance probability requires an inspection plan")
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError(f"rate must be positive, got {lam}")
    acc = CompensatedSum()
    if plan.estimator_ceiling >= plan.xi:
        acc.add(math.exp(-plan.n * lam * plan.tau))
    # scale/beta_arg are prior-dependent and unused here; any b > 0 works.
    for t in mixture_terms(plan.n, plan.tau, plan.xi, plan.c, 1.0):
        k = plan.n - t.m + t.j
        rate = (t.m + plan.c) * lam
        rejected = gamma_cdf(plan.xi - t.shift, t.m, rate)
        acc.add(
            t.sign
            * math.exp(t.log_weight - lam * plan.tau * k)
            * (1.0 - rejected)
        )
    acc.warn_if_ill_conditioned("acceptance_probability")
    return min(1.0, max(0.0, acc.value))


# ----------------------------------------------------------------------
# Vectorized surface used by the grid optimizer.
# ----------------------------------------------------------------------


def risk_grid_type1(
    n: int,
    tau: float,
    xi_grid: np.ndarray,
    c_grid: np.ndarray,
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
) -> np.ndarray:
    """Risk of (n, tau, xi, c) over the outer product of two 1-D grids.

    Returns an array of shape (len(xi_grid), len(c_grid)); plain float64
    summation, adequate for search because the optimizer re-evaluates its
    argmin through the compensated scalar path.
    """
    if n < 1:
        raise DomainError("risk_grid_type1 requires n >= 1")
    xi = np.asarray(xi_grid, dtype=float)[:, None]
    cs = np.asarray(c_grid, dtype=float)[None, :]
    a, b = prior.a, prior.b
    pref = a * math.log(b) - log_gamma(a)
    base = (
        n * costs.sampling_cost
        + tau * costs.time_cost
        + loss.prior_expectation(prior)
    )
    consts = _loss_constants(costs, loss)
    out = np.zeros((xi.shape[0], cs.shape[1]))
    discrete = (n * tau / cs) < xi
    d_term = sum(
        c_l * math.exp(pref + log_gamma(a + p) - (a + p) * math.log(b + n * tau))
        for p, c_l in zip(loss.exponents, consts)
    )
    out += discrete * d_term
    for m in range(1, n + 1):
        mc = m + cs
        for j in range(0, m + 1):
            k = n - m + j
            scale = b + k * tau
            w = mc * xi - k * tau
            arg = np.where(w > 0.0, w / (w + scale), 0.0)
            lw = log_binom(n, m) + log_binom(m, j)
            sign = -1.0 if j % 2 else 1.0
            for p, c_l in zip(loss.exponents, consts):
                if c_l == 0.0:
                    continue
                apl = a + p
                coef = sign * c_l * math.exp(
                    pref + lw + log_gamma(apl) - apl * math.log(scale)
                )
                out += coef * _sp.betainc(m, apl, arg)
    return base + out


def lam_risk_grid(
    n: int,
    tau: float,
    xi_grid: np.ndarray,
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
) -> np.ndarray:
    """MLE-rule risk over a 1-D xi grid at fixed (n, tau)."""
    xi = np.asarray(xi_grid, dtype=float)
    a, b = prior.a, prior.b
    pref = a * math.log(b) - log_gamma(a)
    base = (
        n * costs.sampling_cost
        + tau * costs.time_cost
        + loss.prior_expectation(prior)
    )
    consts = _loss_constants(costs, loss)
    out = np.zeros_like(xi)
    d_term = sum(
        c_l * math.exp(pref + log_gamma(a + p) - (a + p) * math.log(b + n * tau))
        for p, c_l in zip(loss.exponents, consts)
    )
    out += (n * tau < xi) * d_term
    for m in range(1, n + 1):
        for j in range(0, m + 1):
            k = n - m + j
            scale = b + k * tau
            w = m * xi - k * tau
            arg = np.where(w > 0.0, w / (w + scale), 0.0)
            lw = log_binom(n, m) + log_binom(m, j)
            sign = -1.0 if j % 2 else 1.0
            for p, c_l in zip(loss.exponents, consts):
                if c_l == 0.0:
                    continue
                apl = a + p
                coef = sign * c_l * math.exp(
                    pref + lw + log_gamma(apl) - apl * math.log(scale)
                )
                out += coef * _sp.betainc(m, apl, arg)
    return base + out
