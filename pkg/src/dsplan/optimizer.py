"""Bounded grid search for optimal plans (Type-I, hybrid, MLE-rule and
Bayesian-rule variants).

The search space is finite: the sample size is bounded by the rejection
cost over the per-item cost (net of salvage for hybrid plans), the
censoring time by cost bounds and by a high quantile of the marginal
lifetime law, and the decision coordinates by configured ceilings.  Within
those bounds the search follows the three-step nesting — inner (xi, c)
grid, middle tau grid, outer sample size — with a coarse-to-fine pass:
coarse grids at ``refine_factor`` times the final steps locate candidate
cells, which are then rescanned at the final steps (the full fine c axis is
rescanned because the (xi, c) valley is strongly diagonal).

Two prunes keep the loops short without affecting the argmin: a plan's
risk is at least its deterministic costs plus E[min(g(lam), C_r)] (no
decision rule beats the clairvoyant one), and risks are nondecreasing in n
beyond the current best.  Ties are broken toward smaller
(n[, r], tau, xi, c), which makes results independent of evaluation order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import integrate as _integrate

from .dsp_risk import dsp_risk_type1, lam_risk_grid, lam_risk_type1, risk_grid_type1
from .errors import DomainError, UnboundedSearchError
from .hybrid_risk import dsp_risk_hybrid, hybrid_risk_terms, risk_grid_hybrid
from .lsp import LspThresholds, lsp_risk_tau_grid, lsp_risk_type1
from .model import (
    AcceptanceLoss,
    CostModel,
    GammaPrior,
    HybridSamplingPlan,
    LamPlan,
    RiskReport,
    SamplingPlan,
)

__all__ = [
    "SearchConfig",
    "bound_n",
    "tau_range",
    "clairvoyant_floor",
    "optimize_dsp_type1",
    "optimize_dsp_hybrid",
    "optimize_lsp_type1",
    "optimize_lam_type1",
]


@dataclass(frozen=True)
class SearchConfig:
    """Grid-search knobs.

    The step sizes default to the published reproduction grids (xi and tau
    at 0.0125, c at 0.0025); ``alpha`` selects the marginal-lifetime
    quantile used to cap tau, and ``tau_max`` overrides the cap outright
    (required when the time cost is zero and alpha is disabled).
    """

    xi_max: float = 2.0
    c_max: float = 1.0
    xi_step: float = 0.0125
    c_step: float = 0.0025
    tau_step: float = 0.0125
    alpha: Optional[float] = 0.01
    tau_max: Optional[float] = None
    refine_factor: int = 10
    exhaustive: bool = False
    candidates: int = 3
    refine_margin: float = 1.0

    def __post_init__(self) -> None:
        for name in ("xi_step", "c_step", "tau_step"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        for name in ("xi_max", "c_max"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and positive")
        if self.tau_max is not None and not (
            self.tau_max > 0 and math.isfinite(self.tau_max)
        ):
            raise DomainError("tau_max must be finite and positive when given")
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.refine_factor < 1 or int(self.refine_factor) != self.refine_factor:
            raise DomainError("refine_factor must be a positive integer")
        if self.candidates < 1:
            raise DomainError("candidates must be >= 1")


def _grid(step: float, lo: float, hi: float) -> np.ndarray:
    """Multiples of ``step`` inside [max(lo, step), hi]."""
    k0 = max(1, math.ceil(lo / step - 1e-9))
    k1 = math.floor(hi / step + 1e-9)
    if k1 < k0:
        return np.empty(0)
    return np.arange(k0, k1 + 1, dtype=float) * step


def bound_n(
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    best_risk: float = math.inf,
    hybrid: bool = False,
) -> int:
    """Upper bound on the optimal sample size: the smallest of the
    rejection cost, the accept-all risk and the best risk seen so far, per
    item cost (net of salvage for hybrid plans)."""
    per_item = costs.net_item_cost if hybrid else costs.sampling_cost
    if per_item <= 0:
        raise UnboundedSearchError(
            "per-item cost must be positive to bound the sample size"
            + (" (salvage value >= sampling cost)" if hybrid else "")
        )
    cap = min(costs.rejection_cost, loss.prior_expectation(prior), best_risk)
    return int(math.floor(cap / per_item + 1e-9))


def tau_range(
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    config: SearchConfig,
    best_risk: float = math.inf,
) -> Tuple[float, float]:
    """Censoring-time search interval (0, upper].

    The upper end is the smallest available of: the explicit override, the
    cost bound min(C_r, accept-all, best)/C_tau, and the marginal-lifetime
    quantile tau_alpha with P(X <= tau_alpha) = 1 - alpha.
    """
    candidates: List[float] = []
    if config.tau_max is not None:
        candidates.append(config.tau_max)
    if costs.time_cost > 0:
        cap = min(costs.rejection_cost, loss.prior_expectation(prior), best_risk)
        candidates.append(cap / costs.time_cost)
    if config.alpha is not None:
        candidates.append(prior.marginal_lifetime_quantile(1.0 - config.alpha))
    if not candidates:
        raise UnboundedSearchError(
            "zero time cost with no tau_max override or alpha rule leaves "
            "the censoring time unbounded"
        )
    upper = min(candidates)
    if not upper > 0:
        raise DomainError(f"degenerate censoring-time range (upper={upper})")
    return (0.0, upper)


def clairvoyant_floor(
    prior: GammaPrior, costs: CostModel, loss: AcceptanceLoss
) -> float:
    """E[min(g(lam), C_r)]: no decision rule pays less in expectation, so
    deterministic costs plus this floor prune grid cells."""
    cr = costs.rejection_cost
    if loss.coefficients[0] >= cr:
        return cr

    def integrand(lam: float) -> float:
        return min(float(loss.g(lam)), cr) * prior.density(lam)

    # Split at the crossing g = C_r when one exists; g is not monotone in
    # general, so fall back to a plain improper integral otherwise.
    val, err = _integrate.quad(integrand, 0.0, np.inf, limit=400)
    return max(0.0, val - 10.0 * abs(err) - 1e-9)


@dataclass
class SearchStats:
    evaluations: int = 0
    seconds: float = 0.0


def _plan_key(report: RiskReport) -> tuple:
    p = report.plan
    r = getattr(p, "r", 0)
    xi = getattr(p, "xi", 0.0)
    c = getattr(p, "c", 0.0)
    return (report.risk, p.n, r, p.tau, xi, c)


def _better(challenger: RiskReport, incumbent: Optional[RiskReport]) -> bool:
    """Strict risk improvement, with exact ties broken toward the smaller
    (n, r, tau, xi, c) tuple."""
    if incumbent is None:
        return True
    a, b = _plan_key(challenger), _plan_key(incumbent)
    return a < b


def _no_inspection_candidates(
    prior: GammaPrior, costs: CostModel, loss: AcceptanceLoss
) -> List[RiskReport]:
    accept = RiskReport(SamplingPlan.accept_all(), loss.prior_expectation(prior))
    reject = RiskReport(SamplingPlan.reject_all(), costs.rejection_cost)
    return [accept, reject]


def optimize_dsp_type1(
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    config: SearchConfig = SearchConfig(),
    stats_out: Optional[dict] = None,
) -> RiskReport:
    """Minimize the Type-I plan risk over the bounded (n, tau, xi, c) grid."""
    t0 = time.perf_counter()
    stats = SearchStats()
    best: Optional[RiskReport] = None
    for cand in _no_inspection_candidates(prior, costs, loss):
        if _better(cand, best):
            best = cand
    floor = clairvoyant_floor(prior, costs, loss)
    n_cap = bound_n(prior, costs, loss, best.risk)

    def surface(n: int, tau: float, xi: np.ndarray, cs: np.ndarray) -> np.ndarray:
        return risk_grid_type1(n, tau, xi, cs, prior, costs, loss)

    def rescore(n: int, tau: float, xi: float, c: float) -> RiskReport:
        return dsp_risk_type1(SamplingPlan(n, tau, xi, c), prior, costs, loss)

    n = 0
    while True:
        n += 1
        if n > n_cap or n * costs.sampling_cost + floor >= best.risk:
            break
        _, tau_up = tau_range(prior, costs, loss, config, best.risk)
        best = _search_plan_grids(
            n,
            tau_up,
            lambda tau: n * costs.sampling_cost + tau * costs.time_cost + floor,
            surface,
            rescore,
            best,
            config,
            stats,
        )
        n_cap = min(n_cap, bound_n(prior, costs, loss, best.risk))
    stats.seconds = time.perf_counter() - t0
    if stats_out is not None:
        stats_out.update(evaluations=stats.evaluations, seconds=stats.seconds)
    return best


def optimize_dsp_hybrid(
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    config: SearchConfig = SearchConfig(),
    as_printed: bool = False,
    stats_out: Optional[dict] = None,
) -> RiskReport:
    """Minimize the hybrid plan risk over (n, r <= n, tau, xi, c)."""
    t0 = time.perf_counter()
    stats = SearchStats()
    best: Optional[RiskReport] = None
    for cand in _no_inspection_candidates(prior, costs, loss):
        if _better(cand, best):
            best = cand
    floor = clairvoyant_floor(prior, costs, loss)
    n_cap = bound_n(prior, costs, loss, best.risk, hybrid=True)
    net = costs.net_item_cost
    n = 0
    while True:
        n += 1
        if n > n_cap or n * net + floor >= best.risk:
            break
        _, tau_up = tau_range(prior, costs, loss, config, best.risk)
        for r in range(1, n + 1):
            terms_cache: dict = {}

            def fixed_cost(tau: float, n=n, r=r, cache=terms_cache) -> float:
                terms = cache.get(tau)
                if terms is None:
                    terms = cache[tau] = hybrid_risk_terms(n, r, tau, prior)
                return (
                    n * net
                    + terms.expected_failures * costs.salvage_value
                    + terms.expected_duration * costs.time_cost
                    + floor
                )

            def surface(nn: int, tau: float, xi: np.ndarray, cs: np.ndarray, r=r) -> np.ndarray:
                return risk_grid_hybrid(
                    nn, r, tau, xi, cs, prior, costs, loss, as_printed=as_printed
                )

            def rescore(nn: int, tau: float, xi: float, c: float, r=r) -> RiskReport:
                return dsp_risk_hybrid(
                    HybridSamplingPlan(nn, tau, xi, c, r),
                    prior,
                    costs,
                    loss,
                    as_printed=as_printed,
                )

            best = _search_plan_grids(
                n, tau_up, fixed_cost, surface, rescore, best, config, stats
            )
        n_cap = min(n_cap, bound_n(prior, costs, loss, best.risk, hybrid=True))
    stats.seconds = time.perf_counter() - t0
    if stats_out is not None:
        stats_out.update(evaluations=stats.evaluations, seconds=stats.seconds)
    return best


def _search_plan_grids(
    n: int,
    tau_up: float,
    fixed_cost: Callable[[float], float],
    surface: Callable[[int, float, np.ndarray, np.ndarray], np.ndarray],
    rescore: Callable[[int, float, float, float], RiskReport],
    best: RiskReport,
    config: SearchConfig,
    stats: SearchStats,
) -> RiskReport:
    """Shared inner search over (tau, xi, c) for one (n[, r]) combination."""
    fxi, fc, ftau = config.xi_step, config.c_step, config.tau_step
    if config.exhaustive:
        xi_f = _grid(fxi, fxi, config.xi_max)
        c_f = _grid(fc, fc, config.c_max)
        for tau in _grid(ftau, ftau, tau_up):
            if fixed_cost(tau) >= best.risk:
                continue
            best = _scan_cell(n, tau, xi_f, c_f, surface, rescore, best, stats)
        return best
    k = config.refine_factor
    cxi, cc, ctau = fxi * k, fc * k, ftau * k
    xi_c = _grid(cxi, cxi, config.xi_max)
    c_c = _grid(cc, cc, config.c_max)
    c_full = _grid(fc, fc, config.c_max)
    candidates: List[Tuple[float, float, float, float]] = []
    for tau in _grid(ctau, ctau, tau_up):
        if fixed_cost(tau) >= best.risk:
            continue
        grid = surface(n, tau, xi_c, c_c)
        stats.evaluations += grid.size
        i, j = np.unravel_index(int(np.argmin(grid)), grid.shape)
        candidates.append((float(grid[i, j]), tau, float(xi_c[i]), float(c_c[j])))
    candidates.sort()
    for coarse_risk, tau0, xi0, _c0 in candidates[: config.candidates]:
        if coarse_risk >= best.risk + config.refine_margin:
            continue
        xi_f = _grid(fxi, xi0 - 2 * cxi, min(config.xi_max, xi0 + 2 * cxi))
        for tau in _grid(ftau, tau0 - ctau, min(tau_up, tau0 + ctau)):
            if fixed_cost(tau) >= best.risk:
                continue
            best = _scan_cell(n, tau, xi_f, c_full, surface, rescore, best, stats)
    return best


def _scan_cell(
    n: int,
    tau: float,
    xi_f: np.ndarray,
    c_f: np.ndarray,
    surface,
    rescore,
    best: RiskReport,
    stats: SearchStats,
) -> RiskReport:
    if xi_f.size == 0 or c_f.size == 0:
        return best
    grid = surface(n, tau, xi_f, c_f)
    stats.evaluations += grid.size
    i, j = np.unravel_index(int(np.argmin(grid)), grid.shape)
    if grid[i, j] < best.risk + 1e-9:
        # Confirm through the compensated scalar path before accepting.
        report = rescore(n, tau, float(xi_f[i]), float(c_f[j]))
        if _better(report, best):
            return report
    return best


def optimize_lsp_type1(
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    config: SearchConfig = SearchConfig(),
    stats_out: Optional[dict] = None,
) -> RiskReport:
    """Minimize the Bayesian-rule risk over (n, tau); the rule itself is
    already optimal pointwise, so only the fine tau grid is scanned."""
    t0 = time.perf_counter()
    stats = SearchStats()
    best = lsp_risk_type1(0, 0.0, prior, costs, loss)
    stats.evaluations += 1
    floor = clairvoyant_floor(prior, costs, loss)
    n_cap = bound_n(prior, costs, loss, best.risk)
    n = 0
    while True:
        n += 1
        if n > n_cap or n * costs.sampling_cost + floor >= best.risk:
            break
        _, tau_up = tau_range(prior, costs, loss, config, best.risk)
        taus = _grid(config.tau_step, config.tau_step, tau_up)
        viable = taus[n * costs.sampling_cost + taus * costs.time_cost + floor < best.risk]
        if viable.size == 0:
            continue
        thresholds = LspThresholds.compute(n, prior, loss, costs.rejection_cost)
        risks = lsp_risk_tau_grid(n, viable, prior, costs, loss, thresholds)
        stats.evaluations += risks.size
        i = int(np.argmin(risks))
        if risks[i] < best.risk + 1e-9:
            report = lsp_risk_type1(
                n, float(viable[i]), prior, costs, loss, thresholds
            )
            if _better(report, best):
                best = report
        n_cap = min(n_cap, bound_n(prior, costs, loss, best.risk))
    stats.seconds = time.perf_counter() - t0
    if stats_out is not None:
        stats_out.update(evaluations=stats.evaluations, seconds=stats.seconds)
    return best


def optimize_lam_type1(
    prior: GammaPrior,
    costs: CostModel,
    loss: AcceptanceLoss,
    config: SearchConfig = SearchConfig(),
    stats_out: Optional[dict] = None,
) -> RiskReport:
    """Minimize the MLE-rule risk over (n, tau, xi) on the fine grids.

    Zero time cost is the historical setting, so an explicit ``tau_max``
    (or the alpha rule) must bound the censoring time.
    """
    t0 = time.perf_counter()
    stats = SearchStats()
    best: Optional[RiskReport] = None
    for cand in _no_inspection_candidates(prior, costs, loss):
        if _better(cand, best):
            best = cand
    floor = clairvoyant_floor(prior, costs, loss)
    n_cap = bound_n(prior, costs, loss, best.risk)
    xi_f = _grid(config.xi_step, config.xi_step, config.xi_max)
    n = 0
    while True:
        n += 1
        if n > n_cap or n * costs.sampling_cost + floor >= best.risk:
            break
        _, tau_up = tau_range(prior, costs, loss, config, best.risk)
        for tau in _grid(config.tau_step, config.tau_step, tau_up):
            if n * costs.sampling_cost + tau * costs.time_cost + floor >= best.risk:
                continue
            risks = lam_risk_grid(n, tau, xi_f, prior, costs, loss)
            stats.evaluations += risks.size
            i = int(np.argmin(risks))
            if risks[i] < best.risk + 1e-9:
                report = lam_risk_type1(n, tau, float(xi_f[i]), prior, costs, loss)
                if _better(report, best):
                    best = report
        n_cap = min(n_cap, bound_n(prior, costs, loss, best.risk))
    stats.seconds = time.perf_counter() - t0
    if stats_out is not None:
        stats_out.update(evaluations=stats.evaluations, seconds=stats.seconds)
    return best
