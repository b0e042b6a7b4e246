"""Custom exceptions for the variance-gamma smile toolkit."""

from typing import Any


class VGSmileError(Exception):
    """Base exception for vgsmile."""

    def __init__(
        self,
        message: str,
        code: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Initialize exception."""
        super().__init__(message)
        self.message = message
        self.code = code
        self.details = details or {}


class ParameterValidationError(VGSmileError):
    """Invalid model or run parameters."""

    def __init__(self, message: str, **kwargs: Any) -> None:
        """Initialize validation error."""
        kwargs.setdefault("code", "VALIDATION_ERROR")
        super().__init__(message, **kwargs)


class BoundViolationError(ParameterValidationError):
    """Option price outside the strict no-arbitrage bounds."""

    def __init__(self, message: str, bound: str, **kwargs: Any) -> None:
        """Initialize bound violation error."""
        kwargs.setdefault("code", "BOUND_VIOLATION")
        super().__init__(message, **kwargs)
        self.bound = bound
        self.details.setdefault("bound", bound)


class DegenerateInputError(ParameterValidationError):
    """Input carries no usable information (constant, all-zero, empty)."""

    def __init__(self, message: str, **kwargs: Any) -> None:
        """Initialize degenerate input error."""
        kwargs.setdefault("code", "DEGENERATE_INPUT")
        super().__init__(message, **kwargs)


class DomainError(VGSmileError):
    """Argument outside the domain of a function."""

    def __init__(
        self,
        message: str,
        boundary: float | None = None,
        **kwargs: Any,
    ) -> None:
        """Initialize domain error."""
        kwargs.setdefault("code", "DOMAIN_ERROR")
        super().__init__(message, **kwargs)
        self.boundary = boundary
        if boundary is not None:
            self.details.setdefault("boundary", boundary)


class SingularityError(DomainError):
    """Density evaluated at its singular point."""

    def __init__(self, message: str, **kwargs: Any) -> None:
        """Initialize singularity error."""
        kwargs.setdefault("code", "SINGULARITY")
        super().__init__(message, **kwargs)


class NotRepresentableError(DomainError):
    """Parameters have no representation in the requested parameterization."""

    def __init__(self, message: str, **kwargs: Any) -> None:
        """Initialize not-representable error."""
        kwargs.setdefault("code", "NOT_REPRESENTABLE")
        super().__init__(message, **kwargs)


class NumericalError(VGSmileError):
    """Numerical procedure failed."""

    def __init__(
        self,
        message: str,
        operation: str | None = None,
        **kwargs: Any,
    ) -> None:
        """Initialize numerical error."""
        kwargs.setdefault("code", "NUMERICAL_ERROR")
        super().__init__(message, **kwargs)
        self.operation = operation
        if operation is not None:
            self.details.setdefault("operation", operation)


class ConvergenceError(NumericalError):
    """Iteration, series or quadrature did not reach the requested accuracy."""

    def __init__(
        self,
        message: str,
        partial_estimate: float | None = None,
        error_estimate: float | None = None,
        **kwargs: Any,
    ) -> None:
        """Initialize convergence error."""
        kwargs.setdefault("code", "CONVERGENCE_ERROR")
        super().__init__(message, **kwargs)
        self.partial_estimate = partial_estimate
        self.error_estimate = error_estimate
        self.details.setdefault("partial_estimate", partial_estimate)
        self.details.setdefault("error_estimate", error_estimate)


class BracketError(NumericalError):
    """Root finder could not bracket a solution."""

    def __init__(
        self,
        message: str,
        lower: float,
        upper: float,
        **kwargs: Any,
    ) -> None:
        """Initialize bracket error."""
        kwargs.setdefault("code", "BRACKET_ERROR")
        super().__init__(message, **kwargs)
        self.lower = lower
        self.upper = upper
        self.details.setdefault("bracket", [lower, upper])
