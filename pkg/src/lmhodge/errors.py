"""Exception types shared across the package."""

from __future__ import annotations


class LMHodgeError(Exception):
    """Base class for every error raised by lmhodge."""


class DimensionMismatch(LMHodgeError):
    pass


class NotNilpotent(LMHodgeError):
    pass


class NonCommuting(LMHodgeError):
    pass


class NotUnipotent(LMHodgeError):
    pass


class UndecidedRMF(LMHodgeError):
    """The relative monodromy solver could not decide existence."""


class NotInCone(LMHodgeError):
    pass


class NotMHS(LMHodgeError):
    """The pair (W, F) is not a mixed Hodge structure."""


class NotInLieAlgebra(LMHodgeError):
    pass


class OracleDisagreement(LMHodgeError):
    """Certified and sampled orbit verdicts disagree."""


class WeakFanViolation(LMHodgeError):
    pass


class NotSimplicial(LMHodgeError):
    pass


class NotIntegralizable(LMHodgeError):
    pass


class InvalidL(LMHodgeError):
    pass


class FormatError(LMHodgeError):
    """A problem document is malformed."""


class RMFNotExists(LMHodgeError):
    """A relative monodromy filtration needed by the caller does not exist."""

    def __init__(self, message: str, witness: dict | None = None, index: int | None = None):
        super().__init__(message)
        self.witness = witness
        self.index = index
