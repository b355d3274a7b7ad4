"""Seedable Monte Carlo engine: the independent oracle for every closed
form in this package, and the proportion-of-acceptance experiments.

Streams are counter-based (Philox) and split per block of replications
from ``SeedSequence(seed, spawn_key=(block,))``, so estimates are
bit-reproducible for a fixed seed and independent of any parallel
scheduling of whole blocks.  Within a block, draws happen in a fixed
order: one gamma rate per replication (library rejection sampler), then
the n lifetimes by inverse CDF.

Every replication draws a fresh rate from the prior: the acceptance
proportion and the Monte Carlo risk are integrals over the prior, and a
fixed-rate variant would estimate a different quantity.  Fixed-rate
helpers are provided separately for distributional checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np

from .errors import DomainError
from .lsp import LspThresholds
from .model import (
    AcceptanceLoss,
    CostModel,
    GammaPrior,
    HybridSamplingPlan,
    SamplingPlan,
)

__all__ = [
    "ExperimentRecord",
    "MCResult",
    "simulate_experiment",
    "mc_bayes_risk",
    "proportion_of_acceptance",
    "simulate_estimates",
    "acceptance_frequency",
    "substream",
]

Rule = Literal["dsp", "lsp", "lam"]
_BLOCK = 1 << 16


def substream(seed: int, block: int) -> np.random.Generator:
    """Counter-based generator for one replication block."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(block,)))
    )


def _draw_lifetimes(rng: np.random.Generator, lam: np.ndarray, n: int) -> np.ndarray:
    # Inverse-CDF exponentials; 1 - U > 0 because random() < 1.
    u = rng.random((lam.size, n))
    return -np.log1p(-u) / lam[:, None]


@dataclass(frozen=True)
class ExperimentRecord:
    """One simulated life test with the decisions of all three rules."""

    lam: float
    scheme: Literal["type1", "hybrid"]
    n: int
    failures: int
    total_time_on_test: float
    duration: float
    accept_dsp: bool
    accept_lsp: Optional[bool]
    accept_lam: bool
    loss_dsp: float
    loss_lsp: Optional[float]
    loss_lam: float


@dataclass(frozen=True)
class MCResult:
    estimate: float
    se: float
    replications: int


def _censor_type1(x: np.ndarray, tau: float):
    m = (x <= tau).sum(axis=1)
    y = np.minimum(x, tau).sum(axis=1)
    return m, y


def _censor_hybrid(x: np.ndarray, r: int, tau: float):
    xs = np.sort(x, axis=1)
    xr = xs[:, r - 1]
    stopped = xr <= tau
    tau_star = np.where(stopped, xr, tau)
    m_type1 = (xs <= tau).sum(axis=1)
    m_star = np.where(stopped, r, m_type1)
    cum = np.cumsum(xs, axis=1)
    y_r = cum[:, r - 1] + (x.shape[1] - r) * xr
    y_t = np.minimum(xs, tau).sum(axis=1)
    y_star = np.where(stopped, y_r, y_t)
    return m_star, y_star, tau_star


def _decisions(
    plan: Union[SamplingPlan, HybridSamplingPlan],
    m: np.ndarray,
    y: np.ndarray,
    thresholds: Optional[LspThresholds],
):
    n, tau = plan.n, plan.tau
    theta = y / (m + plan.c)
    acc_dsp = theta >= plan.xi
    theta_lam = np.where(m > 0, y / np.maximum(m, 1), n * tau)
    acc_lam = theta_lam >= plan.xi
    acc_lsp = None
    if thresholds is not None:
        # The +/-inf sentinels fall out of the comparison directly.
        acc_lsp = y >= np.asarray(thresholds.levels)[m]
    return acc_dsp, acc_lsp, acc_lam


def simulate_experiment(
    rng: np.random.Generator,
    plan: Union[SamplingPlan, HybridSamplingPlan],
    lam: float,
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    thresholds: Optional[LspThresholds] = None,
) -> ExperimentRecord:
    """Run one life test at a fixed rate and record all three decisions."""
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError(f"rate must be positive, got {lam}")
    if plan.n < 1:
        raise DomainError("simulation requires an inspection plan")
    if thresholds is None:
        thresholds = LspThresholds.compute(plan.n, prior, loss, costs.rejection_cost)
    lam_vec = np.array([lam])
    x = _draw_lifetimes(rng, lam_vec, plan.n)
    hybrid = isinstance(plan, HybridSamplingPlan)
    if hybrid:
        m, y, tau_star = _censor_hybrid(x, plan.r, plan.tau)
    else:
        m, y = _censor_type1(x, plan.tau)
        tau_star = np.array([plan.tau])
    acc_dsp, acc_lsp, acc_lam = _decisions(plan, m, y, thresholds)
    g = float(loss.g(lam))

    def realized(accept: bool) -> float:
        outcome = g if accept else costs.rejection_cost
        if hybrid:
            return (
                plan.n * costs.sampling_cost
                - (plan.n - int(m[0])) * costs.salvage_value
                + float(tau_star[0]) * costs.time_cost
                + outcome
            )
        return plan.n * costs.sampling_cost + plan.tau * costs.time_cost + outcome

    return ExperimentRecord(
        lam=lam,
        scheme="hybrid" if hybrid else "type1",
        n=plan.n,
        failures=int(m[0]),
        total_time_on_test=float(y[0]),
        duration=float(tau_star[0]),
        accept_dsp=bool(acc_dsp[0]),
        accept_lsp=bool(acc_lsp[0]),
        accept_lam=bool(acc_lam[0]),
        loss_dsp=realized(bool(acc_dsp[0])),
        loss_lsp=realized(bool(acc_lsp[0])),
        loss_lam=realized(bool(acc_lam[0])),
    )


def _rule_acceptance(
    rule: Rule,
    plan: Union[SamplingPlan, HybridSamplingPlan],
    m: np.ndarray,
    y: np.ndarray,
    thresholds: Optional[LspThresholds],
) -> np.ndarray:
    acc_dsp, acc_lsp, acc_lam = _decisions(
        plan, m, y, thresholds if rule == "lsp" else None
    )
    if rule == "dsp":
        return acc_dsp
    if rule == "lam":
        return acc_lam
    return acc_lsp


def _iter_blocks(replications: int):
    start = 0
    block = 0
    while start < replications:
        yield block, min(_BLOCK, replications - start)
        start += _BLOCK
        block += 1


def mc_bayes_risk(
    rule: Rule,
    plan: Union[SamplingPlan, HybridSamplingPlan],
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    replications: int,
    seed: int,
) -> MCResult:
    """Monte Carlo Bayes risk: a fresh rate from the prior, one experiment
    and one realized loss per replication."""
    if replications < 10_000:
        raise DomainError("use at least 10,000 replications for a risk estimate")
    if rule not in ("dsp", "lsp", "lam"):
        raise DomainError(f"unknown rule {rule!r}")
    hybrid = isinstance(plan, HybridSamplingPlan)
    thresholds = (
        LspThresholds.compute(plan.n, prior, loss, costs.rejection_cost)
        if rule == "lsp" and plan.n >= 1
        else None
    )
    total = 0.0
    total_sq = 0.0
    for block, size in _iter_blocks(replications):
        rng = substream(seed, block)
        lam = rng.gamma(prior.a, 1.0 / prior.b, size=size)
        g = np.asarray(loss.g(lam))
        if plan.n == 0:
            accept = np.full(size, plan.xi == 0.0)
            losses = np.where(accept, g, costs.rejection_cost)
        else:
            x = _draw_lifetimes(rng, lam, plan.n)
            if hybrid:
                m, y, tau_star = _censor_hybrid(x, plan.r, plan.tau)
            else:
                m, y = _censor_type1(x, plan.tau)
                tau_star = plan.tau
            accept = _rule_acceptance(rule, plan, m, y, thresholds)
            outcome = np.where(accept, g, costs.rejection_cost)
            if hybrid:
                losses = (
                    plan.n * costs.sampling_cost
                    - (plan.n - m) * costs.salvage_value
                    + tau_star * costs.time_cost
                    + outcome
                )
            else:
                losses = (
                    plan.n * costs.sampling_cost + plan.tau * costs.time_cost + outcome
                )
        total += float(losses.sum())
        total_sq += float((losses * losses).sum())
    mean = total / replications
    var = max(0.0, (total_sq - replications * mean * mean) / (replications - 1))
    return MCResult(mean, math.sqrt(var / replications), replications)


def proportion_of_acceptance(
    rule: Rule,
    plan: Union[SamplingPlan, HybridSamplingPlan],
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    replications: int = 10_000,
    seed: int = 0,
) -> float:
    """Fraction of replications (rate redrawn from the prior each time)
    whose decision is acceptance."""
    if replications < 1:
        raise DomainError("replications must be positive")
    if plan.n == 0:
        return 1.0 if plan.xi == 0.0 else 0.0
    hybrid = isinstance(plan, HybridSamplingPlan)
    thresholds = (
        LspThresholds.compute(plan.n, prior, loss, costs.rejection_cost)
        if rule == "lsp"
        else None
    )
    accepted = 0
    for block, size in _iter_blocks(replications):
        rng = substream(seed, block)
        lam = rng.gamma(prior.a, 1.0 / prior.b, size=size)
        x = _draw_lifetimes(rng, lam, plan.n)
        if hybrid:
            m, y, _ = _censor_hybrid(x, plan.r, plan.tau)
        else:
            m, y = _censor_type1(x, plan.tau)
        accepted += int(_rule_acceptance(rule, plan, m, y, thresholds).sum())
    return accepted / replications


def simulate_estimates(
    plan: Union[SamplingPlan, HybridSamplingPlan],
    lam: float,
    replications: int,
    seed: int,
) -> np.ndarray:
    """Shrinkage estimates from ``replications`` tests at a fixed rate;
    supports distributional checks against the mixture law."""
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError(f"rate must be positive, got {lam}")
    hybrid = isinstance(plan, HybridSamplingPlan)
    chunks = []
    for block, size in _iter_blocks(replications):
        rng = substream(seed, block)
        x = _draw_lifetimes(rng, np.full(size, float(lam)), plan.n)
        if hybrid:
            m, y, _ = _censor_hybrid(x, plan.r, plan.tau)
        else:
            m, y = _censor_type1(x, plan.tau)
        chunks.append(y / (m + plan.c))
    return np.concatenate(chunks)


def acceptance_frequency(
    plan: Union[SamplingPlan, HybridSamplingPlan],
    lam: float,
    replications: int,
    seed: int,
) -> float:
    """Empirical acceptance frequency of the shrinkage rule at a fixed rate."""
    theta = simulate_estimates(plan, lam, replications, seed)
    return float((theta >= plan.xi).mean())
