"""Exception hierarchy shared by every voa_forge module.

Input problems (bad files, malformed tables, inadmissible shifts given as
input) derive from :class:`InputError` and map to exit status 2. Failed
mathematical checks derive from :class:`CheckFailure`, carry the offending
vector or index tuple, and map to exit status 1.
"""

from typing import Any, Optional


class VoaForgeError(Exception):
    """Root of all errors raised by voa_forge."""


class InputError(VoaForgeError, ValueError):
    """Raised when user-supplied data is malformed or out of range."""


class DimensionMismatchError(VoaForgeError, ValueError):
    """Raised when matrix or subspace shapes do not line up."""


class NotASubspaceError(VoaForgeError, ValueError):
    """Raised when a containment required by an operation does not hold."""


class CheckFailure(VoaForgeError):
    """A mathematical identity or structural claim failed.

    Attributes:
        counterexample: The witness of the failure (a vector, an index
            triple, or a label), or None when no single witness exists.
    """

    def __init__(self, message: str, counterexample: Optional[Any] = None) -> None:
        super().__init__(message)
        self.counterexample: Optional[Any] = counterexample


class LeibnizIdentityError(CheckFailure):
    """A bracket table violates the left Leibniz identity."""


class LeviLiftingError(CheckFailure):
    """The linear system of a Levi lifting stage is inconsistent."""


class FrobeniusStructureError(CheckFailure):
    """A V0-style algebra is not commutative Frobenius local as required."""


class GradingError(CheckFailure):
    """A grading operator is not a diagonalizable integral derivation."""


class NonIntegralGradingError(GradingError):
    """A grading operator has a rational eigenvalue that is not an integer."""


class LatticeError(InputError):
    """A Gram matrix or shift vector fails the lattice invariants."""


class InadmissibleShiftError(LatticeError):
    """A shift vector violates the length-minimality condition on L - h."""


class AxiomViolation(CheckFailure):
    """A truncated conformal datum contradicts one of its axioms."""


class TrichotomyError(CheckFailure):
    """No case of the radical trichotomy matches the computed subspaces."""


class CrossCheckError(CheckFailure):
    """Two independent computations of the same quantity disagree."""


class ModeConsistencyError(CheckFailure):
    """Two routes to the same mode action produced different vectors."""


class ModeRecursionError(CheckFailure):
    """The iterate recursion for a composite state ran past the stack limit."""
