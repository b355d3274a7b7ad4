"""Decision-theoretic acceptance sampling plans for exponential lifetimes
under Type-I and hybrid Type-I censoring.

The package computes exact Bayes risks for the shrinkage-estimator plan,
the historical MLE-based rule, and the posterior-threshold Bayesian rule;
optimizes plans by bounded grid search; and validates every closed form
against a seedable Monte Carlo oracle.
"""

from .errors import (
    ConfigError,
    DomainError,
    DsplanError,
    PrecisionWarning,
    UnboundedSearchError,
    UnsupportedLossError,
    UnsupportedParameterError,
)
from .model import (
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
from .numerics import (
    CompensatedSum,
    find_monotone_root,
    gamma_cdf,
    log_gamma,
    reg_inc_beta,
)
from .dsp_risk import (
    MixtureTerm,
    acceptance_probability,
    dsp_risk_type1,
    lam_risk_type1,
    mixture_terms,
)
from .hybrid_risk import (
    HybridRiskTerms,
    dsp_risk_hybrid,
    expected_duration,
    expected_failures,
    hybrid_risk_terms,
)
from .lsp import (
    ALWAYS_ACCEPT,
    ALWAYS_REJECT,
    LspThresholds,
    lsp_decision,
    lsp_risk_type1,
    lsp_threshold,
    posterior_expected_loss,
)
from .optimizer import (
    SearchConfig,
    bound_n,
    optimize_dsp_hybrid,
    optimize_dsp_type1,
    optimize_lam_type1,
    optimize_lsp_type1,
    tau_range,
)
from .simulate import (
    ExperimentRecord,
    MCResult,
    acceptance_frequency,
    mc_bayes_risk,
    proportion_of_acceptance,
    simulate_estimates,
    simulate_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "DsplanError",
    "DomainError",
    "UnsupportedParameterError",
    "UnsupportedLossError",
    "UnboundedSearchError",
    "ConfigError",
    "PrecisionWarning",
    # model
    "GammaPrior",
    "CostModel",
    "AcceptanceLoss",
    "SamplingPlan",
    "HybridSamplingPlan",
    "LamPlan",
    "LspPlan",
    "RiskReport",
    "prior_moment",
    "estimator_value",
    # numerics
    "CompensatedSum",
    "log_gamma",
    "reg_inc_beta",
    "gamma_cdf",
    "find_monotone_root",
    # risks
    "MixtureTerm",
    "mixture_terms",
    "dsp_risk_type1",
    "lam_risk_type1",
    "acceptance_probability",
    "HybridRiskTerms",
    "expected_failures",
    "expected_duration",
    "hybrid_risk_terms",
    "dsp_risk_hybrid",
    "LspThresholds",
    "ALWAYS_ACCEPT",
    "ALWAYS_REJECT",
    "posterior_expected_loss",
    "lsp_threshold",
    "lsp_decision",
    "lsp_risk_type1",
    # optimizer
    "SearchConfig",
    "bound_n",
    "tau_range",
    "optimize_dsp_type1",
    "optimize_dsp_hybrid",
    "optimize_lsp_type1",
    "optimize_lam_type1",
    # simulation
    "ExperimentRecord",
    "MCResult",
    "simulate_experiment",
    "mc_bayes_risk",
    "proportion_of_acceptance",
    "simulate_estimates",
    "acceptance_frequency",
]
