"""Exception hierarchy shared by all modules.

Domain errors (bad input, excluded parameters) map to CLI exit code 2;
numerical errors (integration or solver breakdown) map to exit code 1.
"""

from __future__ import annotations


class TritronqueeError(Exception):
    """Base class; ``code`` is a short machine-readable tag."""

    code = "error"
    exit_code = 1


class DomainError(TritronqueeError, ValueError):
    code = "domain"
    exit_code = 2


class HalfIntegerAlphaError(DomainError):
    code = "half_integer_alpha"


class UnsupportedRegimeError(DomainError):
    code = "unsupported_regime"


class DegenerateParameterError(DomainError):
    code = "degenerate_parameter"


class SeedQualityError(DomainError):
    code = "seed_quality"


class ConfigurationError(DomainError):
    code = "configuration"


class NumericalError(TritronqueeError, ArithmeticError):
    code = "numerical"
    exit_code = 1


class IntegrationFailure(NumericalError):
    code = "integration_failure"

    def __init__(self, message: str, state: dict | None = None):
        super().__init__(message)
        self.state = state or {}


class InconsistentPoleError(NumericalError):
    code = "inconsistent_pole"


class NearNonSolvabilityError(NumericalError):
    code = "near_non_solvability"


class ZeroOfVError(NumericalError):
    code = "zero_of_v"
