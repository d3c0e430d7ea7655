"""Exception types shared across the package."""


class RmtLabError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(RmtLabError, ValueError):
    """An ensemble or experiment description violates its constraints."""


class ContractViolationError(RmtLabError, ValueError):
    """An input breaks a documented precondition (e.g. a non-Hermitian matrix)."""


class InsufficientStatisticsError(RmtLabError, RuntimeError):
    """Too little data in a window or batch to form the requested estimate."""


class PoleError(RmtLabError, ArithmeticError):
    """Evaluation requested on the zero manifold of F_b, where the action log diverges."""


class QuadratureError(RmtLabError, RuntimeError):
    """A numerical integral did not converge to the requested tolerance."""
