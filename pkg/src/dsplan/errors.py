"""Exception and warning types shared across the package."""


class DsplanError(Exception):
    """Base class for all package errors."""


class DomainError(DsplanError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedParameterError(DomainError):
    """Parameters for which no closed form is available (e.g. prior shape <= 1
    in the expected hybrid test duration)."""


class UnsupportedLossError(DomainError):
    """Loss functions outside an operation's closed-form scope (e.g. the
    Bayesian-plan risk with non-integer exponents)."""


class UnboundedSearchError(DsplanError):
    """The optimizer cannot bound its grid (zero per-item or per-time cost
    without an explicit range override)."""


class ConfigError(DsplanError, ValueError):
    """A run configuration document is malformed or inconsistent."""


class PrecisionWarning(UserWarning):
    """An alternating sum lost enough leading digits that the result may be
    less accurate than the nominal tolerance."""
