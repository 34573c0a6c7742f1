"""Exception types shared across the package."""


class MongesolError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(MongesolError):
    """Invalid family parameters or run configuration."""


class DomainError(MongesolError):
    """Evaluation requested outside a family's safe domain."""


class BranchCutError(DomainError):
    """log/pow asked for a value on or across its branch cut."""


class FoldError(DomainError):
    """Implicit solve hit a fold point (vanishing branch derivative)."""


class ConvergenceError(MongesolError):
    """An iterative solver ran out of iterations."""


class QuadratureError(MongesolError):
    """A quadrature did not settle under node refinement."""
