"""Exception types raised across the package."""


class QuadHardyError(Exception):
    """Base class for all package errors."""


class DimensionError(QuadHardyError, ValueError):
    pass


class ValidationError(QuadHardyError, ValueError):
    """A matrix failed a structural check (symmetry, group membership, ...)."""


class NotSymplecticError(ValidationError):
    pass


class NotFreeError(QuadHardyError, ValueError):
    """The upper-right block of a symplectic matrix is numerically singular."""


class SingularMatrixError(QuadHardyError, ValueError):
    pass


class NumericOverflowError(QuadHardyError, ArithmeticError):
    pass


class UnsupportedRegimeError(QuadHardyError, ValueError):
    pass


class DefinitenessError(QuadHardyError, ValueError):
    pass


class LatticeError(QuadHardyError, ValueError):
    pass


class AliasingError(QuadHardyError, RuntimeError):
    pass


class DecayBoundViolation(QuadHardyError, RuntimeError):
    """Raised when a sampled Wigner distribution breaks its Gaussian envelope.

    Attributes
    ----------
    worst_point : tuple
        Lattice coordinates ``(x, xi)`` of the largest violation.
    ratio : float
        Observed coefficient divided by the admissible one.
    """

    def __init__(self, message, worst_point, ratio):
        super().__init__(message)
        self.worst_point = worst_point
        self.ratio = ratio
