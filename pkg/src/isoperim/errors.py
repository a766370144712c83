"""Semantic exception hierarchy shared across the package."""


class IsoperimError(Exception):
    """Base class for all package errors."""


class DomainError(IsoperimError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnsupportedDimensionError(DomainError):
    """Tensor quadrature requested beyond the supported dimension cap."""

    def __init__(self, dimension: int, limit: int = 3):
        self.dimension = dimension
        self.limit = limit
        super().__init__(
            f"tensor rules are capped at dimension {limit} (got {dimension}); "
            f"node count grows as order**dimension"
        )


class SingularityError(IsoperimError):
    """Surface derivatives blow up at the requested point."""


class RegionError(IsoperimError):
    """Evaluation outside the validity region of a heat solution."""


class IllPosedError(IsoperimError):
    """Backwards-heat mode amplification exceeded the hard cap."""

    def __init__(self, message: str, safe_horizon: float):
        self.safe_horizon = safe_horizon
        super().__init__(f"{message}; safe horizon is t <= {safe_horizon:.6g}")


class ReconstructionError(IsoperimError):
    """Newton solve for the characteristic system failed to converge."""

    def __init__(self, message: str, residual: float, iterations: int,
                 reason: str = "diverged"):
        self.residual = residual
        self.iterations = iterations
        self.reason = reason
        super().__init__(f"{message} (last residual {residual:.3e} after {iterations} iterations)")


class NonInvertibleGradientError(IsoperimError):
    """Boundary data whose gradient is not strictly increasing."""


class RootBracketError(IsoperimError):
    """A monotone root solve could not bracket its target."""


class IntegrationError(IsoperimError):
    """Integrand returned a non-finite value at a quadrature node."""


class PreconditionError(IsoperimError):
    """Caller violated a stated operation precondition."""


class ConfigError(IsoperimError):
    """Invalid command-line or run configuration."""
