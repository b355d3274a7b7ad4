"""Domain types shared by the risk formulas, the optimizer and the simulator.

Everything here is an immutable value object validated on construction, so
instances can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError
from .numerics import log_gamma

__all__ = [
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
]

# Grid on which nonnegativity of an acceptance loss is checked numerically:
# arbitrary real exponents admit no simple algebraic criterion.
_POSITIVITY_GRID = np.logspace(-6.0, 6.0, 1000)


@dataclass(frozen=True)
class GammaPrior:
    """Conjugate gamma prior on the exponential failure rate.

    ``a`` is the shape and ``b`` the (rate-parameterization) scale, i.e. the
    prior density is b^a * lam^(a-1) * exp(-lam*b) / Gamma(a) for lam > 0.
    """

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and math.isfinite(self.a)):
            raise DomainError(f"prior shape must be positive, got {self.a}")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise DomainError(f"prior scale must be positive, got {self.b}")

    def density(self, lam: float) -> float:
        if lam <= 0:
            return 0.0
        return math.exp(
            self.a * math.log(self.b)
            - log_gamma(self.a)
            + (self.a - 1.0) * math.log(lam)
            - lam * self.b
        )

    def marginal_lifetime_cdf(self, t: float) -> float:
        """P(X <= t) for a lifetime X with rate drawn from this prior
        (a Lomax law): 1 - (b / (b + t))^a."""
        if t <= 0:
            return 0.0
        return 1.0 - (self.b / (self.b + t)) ** self.a

    def marginal_lifetime_quantile(self, q: float) -> float:
        """Inverse of :meth:`marginal_lifetime_cdf` on (0, 1)."""
        if not 0.0 < q < 1.0:
            raise DomainError(f"quantile level must lie in (0, 1), got {q}")
        return self.b * ((1.0 - q) ** (-1.0 / self.a) - 1.0)


@dataclass(frozen=True)
class CostModel:
    """Economic constants of the loss function.

    ``salvage_value`` is credited per unfailed item and only enters hybrid
    plans; it must stay below ``sampling_cost`` for the hybrid sample-size
    bound to exist.
    """

    sampling_cost: float
    time_cost: float
    rejection_cost: float
    salvage_value: float = 0.0

    def __post_init__(self) -> None:
        for name in ("sampling_cost", "time_cost", "rejection_cost", "salvage_value"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and >= 0, got {v}")

    @property
    def net_item_cost(self) -> float:
        """Per-item cost after salvage; the hybrid bound's denominator."""
        return self.sampling_cost - self.salvage_value


@dataclass(frozen=True)
class AcceptanceLoss:
    """Acceptance loss g(lam) = sum_l coefficients[l] * lam**exponents[l].

    The first exponent must be 0 (the constant term), the exponents strictly
    increasing, and g must be nonnegative over a wide log-spaced grid of
    rates; violations raise at construction.
    """

    exponents: Tuple[float, ...]
    coefficients: Tuple[float, ...]

    def __post_init__(self) -> None:
        exps = tuple(float(p) for p in self.exponents)
        coefs = tuple(float(cf) for cf in self.coefficients)
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "coefficients", coefs)
        if len(exps) != len(coefs) or not exps:
            raise DomainError("exponents and coefficients must be equal-length, nonempty")
        if exps[0] != 0.0:
            raise DomainError("the first loss term must be the constant (exponent 0)")
        if any(p2 <= p1 for p1, p2 in zip(exps, exps[1:])):
            raise DomainError("loss exponents must be strictly increasing")
        if any(p < 0 or not math.isfinite(p) for p in exps):
            raise DomainError("loss exponents must be finite and >= 0")
        if any(not math.isfinite(cf) for cf in coefs):
            raise DomainError("loss coefficients must be finite")
        values = self.g(_POSITIVITY_GRID)
        if np.any(values < 0.0):
            lam_bad = float(_POSITIVITY_GRID[int(np.argmin(values))])
            raise DomainError(
                f"acceptance loss is negative near lam={lam_bad:.3g} "
                f"(g={float(np.min(values)):.3g})"
            )

    @classmethod
    def polynomial(cls, coefficients: Sequence[float]) -> "AcceptanceLoss":
        """Loss a_0 + a_1*lam + ... + a_k*lam^k."""
        return cls(tuple(range(len(coefficients))), tuple(coefficients))

    @property
    def is_polynomial(self) -> bool:
        return all(float(p).is_integer() for p in self.exponents)

    @property
    def degree(self) -> float:
        return self.exponents[-1]

    def g(self, lam):
        """Evaluate the loss at a scalar or array of rates."""
        lam = np.asarray(lam, dtype=float)
        out = np.zeros_like(lam)
        for p, cf in zip(self.exponents, self.coefficients):
            out = out + cf * lam**p
        return out if out.ndim else float(out)

    def prior_expectation(self, prior: GammaPrior) -> float:
        """E[g(lam)] under the prior: the accept-without-inspection risk."""
        return sum(
            cf * prior_moment(prior, p)
            for p, cf in zip(self.exponents, self.coefficients)
        )


@dataclass(frozen=True)
class SamplingPlan:
    """Type-I censored plan (n, tau, xi, c): test n items until time tau and
    accept when the shrinkage estimate of the mean lifetime is >= xi.

    n = 0 encodes the no-inspection plans: xi = 0 accepts outright and
    xi = +inf rejects outright.
    """

    n: int
    tau: float
    xi: float
    c: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"sample size must be a count >= 0, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if self.xi < 0 or math.isnan(self.xi):
            raise DomainError(f"acceptance threshold xi must be >= 0, got {self.xi}")
        if self.n == 0:
            if self.tau != 0.0 or self.c != 0.0:
                raise DomainError("a no-inspection plan requires tau = 0 and c = 0")
            if self.xi not in (0.0, math.inf):
                raise DomainError("a no-inspection plan decides by xi in {0, +inf}")
        else:
            if not (self.tau > 0 and math.isfinite(self.tau)):
                raise DomainError(f"censoring time must be positive, got {self.tau}")
            if not (self.c > 0 and math.isfinite(self.c)):
                raise DomainError(f"shrinkage constant must be positive, got {self.c}")

    @property
    def is_inspection(self) -> bool:
        return self.n >= 1

    @property
    def estimator_ceiling(self) -> float:
        """Largest attainable estimate, n*tau/c, reached when nothing fails."""
        if self.n == 0:
            return math.inf
        return self.n * self.tau / self.c

    @staticmethod
    def accept_all() -> "SamplingPlan":
        return SamplingPlan(0, 0.0, 0.0, 0.0)

    @staticmethod
    def reject_all() -> "SamplingPlan":
        return SamplingPlan(0, 0.0, math.inf, 0.0)

    def to_record(self) -> dict:
        return {"n": self.n, "tau": self.tau, "xi": self.xi, "c": self.c}


@dataclass(frozen=True)
class HybridSamplingPlan(SamplingPlan):
    """Hybrid plan (n, r, tau, xi, c): the test stops at the earlier of the
    r-th failure and tau."""

    r: int = 1

    def __post_init__(self) -> None:
        super().__post_init__()
        if int(self.r) != self.r or not 1 <= self.r <= self.n:
            raise DomainError(
                f"failure threshold must satisfy 1 <= r <= n, got r={self.r}, n={self.n}"
            )
        object.__setattr__(self, "r", int(self.r))

    def to_record(self) -> dict:
        return {"n": self.n, "r": self.r, "tau": self.tau, "xi": self.xi, "c": self.c}


@dataclass(frozen=True)
class LamPlan:
    """Historical MLE-based plan (n, tau, xi); the estimator falls back to
    n*tau when nothing fails, so no shrinkage constant is involved."""

    n: int
    tau: float
    xi: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"sample size must be a count >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise DomainError(f"censoring time must be positive, got {self.tau}")
        if self.xi < 0 or math.isnan(self.xi):
            raise DomainError(f"acceptance threshold must be >= 0, got {self.xi}")

    def to_record(self) -> dict:
        return {"n": self.n, "tau": self.tau, "xi": self.xi}


@dataclass(frozen=True)
class LspPlan:
    """Bayesian-rule plan (n, tau); the decision is the posterior threshold
    rule, so no (xi, c) coordinates exist.  n = 0 decides from the prior."""

    n: int
    tau: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"sample size must be a count >= 0, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if self.n == 0:
            if self.tau != 0.0:
                raise DomainError("a no-inspection plan requires tau = 0")
        elif not (self.tau > 0 and math.isfinite(self.tau)):
            raise DomainError(f"censoring time must be positive, got {self.tau}")

    def to_record(self) -> dict:
        return {"n": self.n, "tau": self.tau}


@dataclass(frozen=True)
class RiskReport:
    """A plan, its exact Bayes risk, and optional Monte Carlo corroboration."""

    plan: Union[SamplingPlan, HybridSamplingPlan, LamPlan, LspPlan]
    risk: float
    mc_estimate: Optional[float] = None
    mc_se: Optional[float] = None
    cancellation_ratio: Optional[float] = None

    @property
    def mc_consistent(self) -> Optional[bool]:
        """True when the exact value sits within 4 standard errors of the
        Monte Carlo estimate; None when no estimate is attached."""
        if self.mc_estimate is None or self.mc_se is None:
            return None
        return abs(self.risk - self.mc_estimate) <= 4.0 * self.mc_se

    def with_mc(self, estimate: float, se: float) -> "RiskReport":
        return RiskReport(self.plan, self.risk, estimate, se, self.cancellation_ratio)

    def to_record(self) -> dict:
        rec = dict(self.plan.to_record())
        rec["risk"] = self.risk
        if self.mc_estimate is not None:
            rec["mc_estimate"] = self.mc_estimate
            rec["mc_se"] = self.mc_se
            rec["mc_consistent"] = self.mc_consistent
        if self.cancellation_ratio is not None:
            rec["cancellation_ratio"] = self.cancellation_ratio
        return rec


def prior_moment(prior: GammaPrior, p: float) -> float:
    """E(lam^p) = Gamma(a + p) / (Gamma(a) * b^p) for p >= 0."""
    if p < 0 or not math.isfinite(p):
        raise DomainError(f"moment order must be finite and >= 0, got {p}")
    if p == 0:
        return 1.0
    return math.exp(
        log_gamma(prior.a + p) - log_gamma(prior.a) - p * math.log(prior.b)
    )


def estimator_value(
    failure_times: Sequence[float], n: int, tau: float, c: float
) -> float:
    """Shrinkage estimate (sum of failure times + (n - M) * tau) / (M + c).

    Defined for every failure count, including M = 0 where it equals
    n * tau / c.
    """
    times = [float(t) for t in failure_times]
    m = len(times)
    if m > n:
        raise DomainError(f"{m} failure times for a sample of {n}")
    if not (c > 0 and math.isfinite(c)):
        raise DomainError(f"shrinkage constant must be positive, got {c}")
    if tau <= 0:
        raise DomainError(f"censoring time must be positive, got {tau}")
    for t in times:
        if not 0.0 < t <= tau:
            raise DomainError(f"failure time {t} outside (0, tau={tau}]")
    return (math.fsum(times) + (n - m) * tau) / (m + c)
