"""Structured errors shared across the package.

Every error carries a short machine-readable ``code`` (used by the CLI to emit
JSON error payloads) and an optional ``details`` mapping.
"""

from __future__ import annotations


class ShrinkageError(Exception):
    """Base class for all structured errors raised by this package."""

    code = "error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_json_dict(self):
        out = {"error": self.code, "message": self.message}
        if self.details:
            out["details"] = {k: v for k, v in self.details.items()}
        return out


class ValidationError(ShrinkageError):
    """Bad user input: shapes, domains, flags, config fields."""

    code = "validation"


class ParseError(ValidationError):
    """Unreadable or malformed input file."""

    code = "parse"


class DimensionMismatchError(ValidationError):
    """Objects that must share a dimension do not."""

    code = "dimension-mismatch"


class PayloadMismatchError(ValidationError):
    """A Gram-only source summary was used where row-level data is required."""

    code = "payload-mismatch"


class TooManySourcesError(ValidationError):
    """All-subsets enumeration requested for more sources than supported."""

    code = "too-many-sources"


class RankDeficientError(ShrinkageError):
    """A matrix that must be positive definite is (numerically) singular."""

    code = "rank-deficient"


class NonConvergenceError(ShrinkageError):
    """An iterative solver hit its iteration cap."""

    code = "non-convergence"


class SeparationError(ShrinkageError):
    """Logistic coefficients diverged: the MLE does not exist."""

    code = "separation"


class ZeroDeltaError(ShrinkageError):
    """A dial bound was requested at zero discrepancy (the bound is infinite)."""

    code = "zero-delta"
