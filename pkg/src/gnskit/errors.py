"""Exception hierarchy shared by all modules.

The CLI maps these onto its exit-code contract: FormatError -> 2,
CapacityError -> 3, ContractViolation -> 1.
"""

from __future__ import annotations


class GnsKitError(Exception):
    """Base class for all library errors."""


class FormatError(GnsKitError):
    """Malformed input text or an input violating a parse-time contract."""


class CapacityError(GnsKitError):
    """An exact computation was refused because a configured cap was exceeded."""


class ContractViolation(GnsKitError):
    """A caller-supplied certificate failed verification, or an internal
    inequality that must hold was found violated."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
