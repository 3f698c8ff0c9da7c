"""Exception hierarchy.

Every exception carries a short machine-readable ``code`` that the CLI prints
alongside the human message.
"""

from __future__ import annotations


class TidyScaleError(Exception):
    code = "error"


class ValidationError(TidyScaleError, ValueError):
    code = "invalid-input"


class SingularMatrixError(ValidationError):
    code = "singular-matrix"


class Step1CapExceeded(TidyScaleError):
    """Step 1 of the tidying procedure did not reach (T1) within the cap."""

    code = "step1-cap-exceeded"

    def __init__(self, cap: int):
        super().__init__(f"step-1 did not stabilize within cap={cap}")
        self.cap = cap


class UnsupportedError(TidyScaleError):
    code = "unsupported"


class BudgetExceeded(TidyScaleError):
    code = "budget-exceeded"


class ConsistencyError(TidyScaleError, AssertionError):
    """Two independent computations of the same quantity disagreed."""

    code = "consistency"
