"""Exception hierarchy shared by all wams modules."""


class WamsError(Exception):
    """Base class for every error raised by wams."""


class ValidationError(WamsError, ValueError):
    """Input violates a documented invariant (bad value, bad file content)."""


class DomainError(ValidationError):
    """A coordinate or grid does not belong to the expected domain."""


class PartitionError(ValidationError):
    """Boxes overlap or leave part of the domain uncovered."""


class GeometryError(ValidationError):
    """A construction does not fit inside the domain or cube it needs."""


class DegenerateGeometryError(GeometryError):
    """The one-sided weight trace along a jump is not well defined."""


class ResolutionError(ValidationError):
    """The grid is too coarse for the requested measurement."""


class UnsupportedDirectionError(ValidationError):
    """Slicing direction is not representable on the grid."""


class SolverError(WamsError, RuntimeError):
    """An iterative solve failed to reach its tolerance.

    Attributes
    ----------
    residual : float
        Relative residual at the last iterate.
    iterations : int
        Number of iterations performed.
    """

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SingularSystemError(SolverError):
    """The u-problem has no unique minimizer (zero fidelity weight)."""
