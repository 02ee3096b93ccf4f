"""Exception types shared across the package."""

from __future__ import annotations


class ConfigValidationError(ValueError):
    """One or more config invariants failed; carries the aggregated issue list.

    Each issue is a (code, message) pair, e.g. ("dimension_mismatch", ...).
    """

    def __init__(self, issues):
        self.issues = tuple(issues)
        super().__init__("; ".join(msg for _, msg in self.issues))

    def codes(self):
        return tuple(code for code, _ in self.issues)


class NonPositiveIntensity(ValueError):
    """Arithmetic intensity must be strictly positive for roofline placement."""


class InsufficientPoints(ValueError):
    """A slope fit needs at least three strictly increasing points."""


class RegimeViolation(ValueError):
    """Sweep points straddle the ridge or the sequence-length margin."""


class ExponentMismatch(AssertionError):
    """Fitted scaling exponents of the closed form and the counting oracle diverge."""


class ConstantDrift(AssertionError):
    """The closed-form/oracle ratio is not constant across a sweep: the two
    implementations differ structurally, not just by a constant convention."""


class KeyMismatch(ValueError):
    """Baseline and accelerated row sets do not share identical sweep keys."""


class EmptyRowSet(ValueError):
    """Report emission was asked to write zero rows."""
