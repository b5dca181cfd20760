"""
Custom exceptions for the orthoverify package.

All exceptions inherit from VerificationError for easy catching.
"""


class VerificationError(Exception):
    """Base exception for all verification-related errors."""

    pass


class InvalidPrimeError(VerificationError):
    """Raised when a field characteristic is even, not prime, or out of bounds."""

    pass


class InternalError(VerificationError):
    """Raised when an invariant that should be impossible to break is broken."""

    pass


class DivisionByZeroError(VerificationError):
    """Raised when dividing by the zero element of a finite field."""

    pass


class FieldMismatchError(VerificationError):
    """Raised when an operation mixes elements of two different fields."""

    pass


class EmptyInputError(VerificationError):
    """Raised when an operation needs at least one vector and got none."""

    pass


class BudgetExceededError(VerificationError):
    """Raised when an enumeration would exceed its configured budget.

    The exception carries the bound that was violated and the size the
    enumeration would have needed, so callers can report it.
    """

    def __init__(self, what: str, bound: int, required: int):
        self.what = what
        self.bound = bound
        self.required = required
        super().__init__(f"{what}: {required} exceeds budget {bound}")


class DegenerateSubspaceError(VerificationError):
    """Raised when an operation needs a nondegenerate subspace."""

    pass


class EvenCharacteristicError(VerificationError):
    """Raised when a geometry is requested over a field of characteristic 2."""

    pass


class EmptyFlagError(VerificationError):
    """Raised when a residue is requested for the empty flag."""

    pass


class FlagNotInGeometryError(VerificationError):
    """Raised when a flag has objects outside the geometry or is not a chain."""

    pass


class NotATriangleError(VerificationError):
    """Raised when three points are not distinct and pairwise collinear."""

    pass


class DisconnectedComplexError(VerificationError):
    """Raised when a connected complex is required but several components exist."""

    pass


class IsotropicVectorError(VerificationError):
    """Raised when a reflection is requested in an isotropic vector."""

    pass


class DimensionMismatchError(VerificationError):
    """Raised when two subspaces that must have equal dimension do not."""

    pass


class ClassMismatchError(VerificationError):
    """Raised when two subspaces have different square/nonsquare classes.

    Isometries preserve the class, so no isometry can map one onto the other.
    """

    pass


class DegenerateInputError(VerificationError):
    """Raised when an isometry is requested between degenerate subspaces."""

    pass


class ConfigurationError(VerificationError):
    """Raised when the verifier configuration is invalid or cannot be loaded."""

    pass


class UsageError(VerificationError):
    """Raised when command arguments describe an empty or inverted range."""

    pass
