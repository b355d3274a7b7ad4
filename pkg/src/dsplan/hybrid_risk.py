"""Exact Bayes risk under hybrid Type-I censoring.

A hybrid test stops at the earlier of the r-th failure and the fixed time
tau, salvages the unfailed items, and is charged for the realized duration.
The risk couples the Type-I mixture terms for fewer than r failures with a
stopped-at-the-r-th-failure block, plus the expected failure count E(M*)
and the expected duration E(tau*).

Two printed-formula corrections are applied here, both validated against
the Monte Carlo oracle and the published optima (see the risk tests):

* the Type-I-like double sum runs over m = 1..r-1 (running it to n double
  counts the r-th-failure block and breaks the r = n degeneration to the
  plain Type-I risk);
* the duration's tail term is tau * P(fewer than r failures by tau); summed
  the other way the expectation would exceed tau and diverge as tau grows.

``as_printed=True`` switches the stopped block's density rate from
(r + c) * lam to r * lam for comparison with the uncorrected text.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .errors import DomainError, UnsupportedParameterError
from .model import (
    AcceptanceLoss,
    CostModel,
    GammaPrior,
    HybridSamplingPlan,
    RiskReport,
)
from .numerics import CompensatedSum, log_binom, log_gamma, reg_inc_beta

__all__ = [
    "HybridRiskTerms",
    "expected_failures",
    "expected_duration",
    "hybrid_risk_terms",
    "dsp_risk_hybrid",
    "risk_grid_hybrid",
]


@dataclass(frozen=True)
class HybridRiskTerms:
    """Deterministic components of a hybrid plan's risk."""

    expected_failures: float
    expected_duration: float


def _marginal_failure_count_mass(n: int, k: int, tau: float, prior: GammaPrior) -> float:
    """P(M = k) under the prior-marginal lifetime law."""
    a, b = prior.a, prior.b
    terms = [
        (-1) ** j
        * math.exp(
            log_binom(n, k)
            + log_binom(k, j)
            + a * (math.log(b) - math.log(b + (n - k + j) * tau))
        )
        for j in range(k + 1)
    ]
    return math.fsum(terms)


def expected_failures(n: int, r: int, tau: float, prior: GammaPrior) -> float:
    """E(M*) = E[min(M, r)] marginally over the prior."""
    _check_nr(n, r)
    if not (tau > 0 and math.isfinite(tau)):
        raise DomainError(f"censoring time must be positive, got {tau}")
    total = math.fsum(
        m * _marginal_failure_count_mass(n, m, tau, prior) for m in range(1, r)
    )
    total += r * math.fsum(
        _marginal_failure_count_mass(n, k, tau, prior) for k in range(r, n + 1)
    )
    return total


def expected_duration(n: int, r: int, tau: float, prior: GammaPrior) -> float:
    """E(tau*) = E[min(X_(r), tau)] marginally over the prior.

    The closed form divides by (a - 1); priors with shape a <= 1 have an
    infinite marginal mean lifetime and are rejected.
    """
    _check_nr(n, r)
    if not (tau > 0 and math.isfinite(tau)):
        raise DomainError(f"censoring time must be positive, got {tau}")
    a, b = prior.a, prior.b
    if a <= 1.0:
        raise UnsupportedParameterError(
            f"expected_duration requires prior shape > 1, got a={a}"
        )
    # E[X_(r); X_(r) <= tau]
    pieces = []
    for j in range(r):
        beta_ = n - j
        coef = (-1) ** (r - 1 - j) * math.exp(log_binom(r - 1, j))
        at = beta_ * tau + b
        pieces.append(
            coef
            * (
                b / (beta_**2 * (a - 1.0))
                - tau * (b / at) ** a / beta_
                - b * (b / at) ** (a - 1.0) / (beta_**2 * (a - 1.0))
            )
        )
    stopped_early = r * math.exp(log_binom(n, r)) * math.fsum(pieces)
    # tau * P(M <= r - 1): the test survives to tau when fewer than r fail.
    ran_full = tau * math.fsum(
        _marginal_failure_count_mass(n, k, tau, prior) for k in range(r)
    )
    return stopped_early + ran_full


def hybrid_risk_terms(
    n: int, r: int, tau: float, prior: GammaPrior
) -> HybridRiskTerms:
    return HybridRiskTerms(
        expected_failures=expected_failures(n, r, tau, prior),
        expected_duration=expected_duration(n, r, tau, prior),
    )


def _check_nr(n: int, r: int) -> None:
    if not 1 <= r <= n:
        raise DomainError(f"failure threshold must satisfy 1 <= r <= n, got r={r}, n={n}")


def _beta_arg_scalar(xi: float, shift: float, scale: float, divisor: float) -> float:
    if math.isinf(xi):
        return 1.0
    w = divisor * (xi - shift)
    if w <= 0.0:
        return 0.0
    return w / (w + scale)


def dsp_risk_hybrid(
    plan: HybridSamplingPlan,
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    as_printed: bool = False,
) -> RiskReport:
    """Exact Bayes risk of a hybrid plan (n, r, tau, xi, c)."""
    n, r, tau, xi, c = plan.n, plan.r, plan.tau, plan.xi, plan.c
    a, b = prior.a, prior.b
    terms = hybrid_risk_terms(n, r, tau, prior)
    base = (
        n * costs.net_item_cost
        + terms.expected_failures * costs.salvage_value
        + terms.expected_duration * costs.time_cost
        + loss.prior_expectation(prior)
    )
    consts = [costs.rejection_cost - loss.coefficients[0]] + [
        -cf for cf in loss.coefficients[1:]
    ]
    pref = a * math.log(b) - log_gamma(a)
    acc = CompensatedSum()
    ceiling_rejects = plan.estimator_ceiling < xi
    mid_divisor = r if as_printed else r + c
    for p, c_l in zip(loss.exponents, consts):
        if c_l == 0.0:
            continue
        apl = a + p
        lg = log_gamma(apl)
        if ceiling_rejects:
            acc.add(c_l * math.exp(pref + lg - apl * math.log(b + n * tau)))
        # Type-I mixture terms for fewer than r failures.
        for m in range(1, r):
            mc = m + c
            for j in range(0, m + 1):
                k = n - m + j
                scale = b + k * tau
                arg = _beta_arg_scalar(xi, k * tau / mc, scale, mc)
                if arg == 0.0:
                    continue
                inc = reg_inc_beta(arg, m, apl)
                if inc:
                    sign = -1 if j % 2 else 1
                    acc.add(
                        sign
                        * c_l
                        * math.exp(
                            pref
                            + log_binom(n, m)
                            + log_binom(m, j)
                            + lg
                            - apl * math.log(scale)
                        )
                        * inc
                    )
        # Stopped-at-X_(r) block: the unshifted gamma piece ...
        arg0 = _beta_arg_scalar(xi, 0.0, b, mid_divisor)
        if arg0:
            inc0 = reg_inc_beta(arg0, r, apl)
            if inc0:
                acc.add(c_l * math.exp(pref + lg - apl * math.log(b)) * inc0)
        # ... and its alternating correction, weighted r / (n - r + j).
        for j in range(1, r + 1):
            k = n - r + j
            scale = b + k * tau
            arg = _beta_arg_scalar(xi, k * tau / (r + c), scale, r + c)
            if arg == 0.0:
                continue
            inc = reg_inc_beta(arg, r, apl)
            if inc:
                sign = -1 if j % 2 else 1
                acc.add(
                    sign
                    * c_l
                    * (r / k)
                    * math.exp(
                        pref
                        + log_binom(n, r)
                        + log_binom(r - 1, j - 1)
                        + lg
                        - apl * math.log(scale)
                    )
                    * inc
                )
    ratio = acc.warn_if_ill_conditioned("dsp_risk_hybrid")
    return RiskReport(plan, base + acc.value, cancellation_ratio=ratio)


def risk_grid_hybrid(
    n: int,
    r: int,
    tau: float,
    xi_grid: np.ndarray,
    c_grid: np.ndarray,
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    as_printed: bool = False,
) -> np.ndarray:
    """Hybrid risk over the outer product of xi and c grids at fixed
    (n, r, tau); shape (len(xi_grid), len(c_grid))."""
    _check_nr(n, r)
    xi = np.asarray(xi_grid, dtype=float)[:, None]
    cs = np.asarray(c_grid, dtype=float)[None, :]
    a, b = prior.a, prior.b
    terms = hybrid_risk_terms(n, r, tau, prior)
    base = (
        n * costs.net_item_cost
        + terms.expected_failures * costs.salvage_value
        + terms.expected_duration * costs.time_cost
        + loss.prior_expectation(prior)
    )
    consts = [costs.rejection_cost - loss.coefficients[0]] + [
        -cf for cf in loss.coefficients[1:]
    ]
    pref = a * math.log(b) - log_gamma(a)
    out = np.zeros((xi.shape[0], cs.shape[1]))
    discrete = (n * tau / cs) < xi
    d_term = sum(
        c_l * math.exp(pref + log_gamma(a + p) - (a + p) * math.log(b + n * tau))
        for p, c_l in zip(loss.exponents, consts)
    )
    out += discrete * d_term
    mid_divisor = (r + 0.0 * cs) if as_printed else (r + cs)
    for p, c_l in zip(loss.exponents, consts):
        if c_l == 0.0:
            continue
        apl = a + p
        lg = log_gamma(apl)
        for m in range(1, r):
            mc = m + cs
            for j in range(0, m + 1):
                k = n - m + j
                scale = b + k * tau
                w = mc * xi - k * tau
                arg = np.where(w > 0.0, w / (w + scale), 0.0)
                sign = -1.0 if j % 2 else 1.0
                coef = sign * c_l * math.exp(
                    pref + log_binom(n, m) + log_binom(m, j) + lg - apl * math.log(scale)
                )
                out += coef * _sp.betainc(m, apl, arg)
        w0 = mid_divisor * xi
        arg0 = np.where(w0 > 0.0, w0 / (w0 + b), 0.0)
        out += c_l * math.exp(pref + lg - apl * math.log(b)) * _sp.betainc(r, apl, arg0)
        for j in range(1, r + 1):
            k = n - r + j
            scale = b + k * tau
            w = (r + cs) * xi - k * tau
            arg = np.where(w > 0.0, w / (w + scale), 0.0)
            sign = -1.0 if j % 2 else 1.0
            coef = sign * c_l * (r / k) * math.exp(
                pref + log_binom(n, r) + log_binom(r - 1, j - 1) + lg - apl * math.log(scale)
            )
            out += coef * _sp.betainc(r, apl, arg)
    return base + out
