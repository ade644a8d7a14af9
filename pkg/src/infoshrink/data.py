"""Dataset and source-summary containers plus input validation helpers.

Conventions
-----------
* A design matrix is stored p x n: column i holds the covariates X_i of unit
  i.  When an intercept is wanted it must be present as an explicit all-ones
  row; nothing in this package ever adds columns or rows implicitly.
* A source data set enters the penalty only through a SourceSummary: its size
  n1, the fitted coefficients beta1_hat, and either the raw design
  (FullDesign) or - for Gaussian sources only - the scaled Gram matrix
  G1 = X1 X1^T / n1 (GaussianGram).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, PayloadMismatchError, ValidationError
from .families import GAUSSIAN, get_family


def as_float_array(x, name, ndim=None):
    """Coerce to a float ndarray and check finiteness."""
    arr = np.asarray(x, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise ValidationError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def as_float_vector(x, name, length=None):
    v = as_float_array(x, name, ndim=1)
    if length is not None and v.shape[0] != length:
        raise DimensionMismatchError(f"{name} has length {v.shape[0]}, expected {length}")
    return v


def as_spd_shape(A, name, size=None):
    """Shape/symmetry validation for a square matrix (PD-ness is checked where solved)."""
    A = as_float_array(A, name, ndim=2)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {A.shape}")
    if size is not None and A.shape[0] != size:
        raise DimensionMismatchError(f"{name} has size {A.shape[0]}, expected {size}")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-8 * (1.0 + np.abs(A).max())):
        raise ValidationError(f"{name} is not symmetric")
    return A


@dataclass(frozen=True)
class Dataset:
    """A design matrix (p x n, one column per unit) and its response vector."""

    design: np.ndarray
    response: np.ndarray

    def __post_init__(self):
        design = as_float_array(self.design, "design", ndim=2)
        response = as_float_vector(self.response, "response")
        if design.shape[1] != response.shape[0]:
            raise DimensionMismatchError(
                f"design has {design.shape[1]} columns but response has length {response.shape[0]}"
            )
        if design.shape[1] < design.shape[0]:
            raise ValidationError(
                f"need at least as many units as features (n={design.shape[1]}, p={design.shape[0]})"
            )
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "response", response)

    @property
    def n(self):
        return self.design.shape[1]

    @property
    def p(self):
        return self.design.shape[0]

    def check_full_rank(self):
        """Eager full-rank check (used at ingestion; solvers re-detect via Cholesky)."""
        if np.linalg.matrix_rank(self.design) < self.p:
            from .errors import RankDeficientError

            raise RankDeficientError("design matrix is rank deficient")
        return self

    @classmethod
    def from_rows(cls, X_rows, y):
        """Build from an (n, p) row-per-unit matrix (the sklearn orientation)."""
        X_rows = as_float_array(X_rows, "X", ndim=2)
        return cls(X_rows.T, y)


@dataclass(frozen=True)
class FullDesign:
    """Row-level source payload: the design, its family, and d(gamma1)'s argument."""

    design: np.ndarray
    family: object
    gamma1_hat: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "design", as_float_array(self.design, "source design", ndim=2))
        object.__setattr__(self, "family", get_family(self.family))
        object.__setattr__(self, "gamma1_hat", float(self.gamma1_hat))


@dataclass(frozen=True)
class GaussianGram:
    """Gram-only source payload G1 = X1 X1^T / n1; Gaussian sources only."""

    gram: np.ndarray
    sigma_sq: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "gram", as_spd_shape(self.gram, "source gram"))
        if self.sigma_sq is not None:
            object.__setattr__(self, "sigma_sq", float(self.sigma_sq))


@dataclass(frozen=True)
class SourceSummary:
    """Everything the penalty needs from an already-analyzed source data set."""

    n1: int
    beta1_hat: np.ndarray
    payload: object  # FullDesign | GaussianGram

    def __post_init__(self):
        if int(self.n1) < 1:
            raise ValidationError("n1 must be a positive count")
        object.__setattr__(self, "n1", int(self.n1))
        beta = as_float_vector(self.beta1_hat, "beta1_hat")
        object.__setattr__(self, "beta1_hat", beta)
        if isinstance(self.payload, FullDesign):
            if self.payload.design.shape[0] != beta.shape[0]:
                raise DimensionMismatchError("source design and beta1_hat disagree on p")
            if self.payload.design.shape[1] != self.n1:
                raise DimensionMismatchError("source design and n1 disagree")
        elif isinstance(self.payload, GaussianGram):
            if self.payload.gram.shape[0] != beta.shape[0]:
                raise DimensionMismatchError("source gram and beta1_hat disagree on p")
        else:
            raise ValidationError("payload must be FullDesign or GaussianGram")

    @property
    def p(self):
        return self.beta1_hat.shape[0]

    @property
    def has_design(self):
        return isinstance(self.payload, FullDesign)

    def require_design(self, family):
        """Return the raw design, or fail for Gram-only payloads."""
        if not self.has_design:
            raise PayloadMismatchError(
                "this operation needs the row-level source design; "
                "a Gram-only summary was supplied"
            )
        return self.payload.design

    def gram(self):
        """G1 = n1^{-1} X1 X1^T, from either payload."""
        if self.has_design:
            X1 = self.payload.design
            return (X1 @ X1.T) / self.n1
        return self.payload.gram

    def check_family(self, family):
        """Validate the caller's family against the payload's.

        Gram-only payloads are legal for the Gaussian family only; row-level
        payloads must agree with the family they were summarized under.
        """
        family = get_family(family)
        if self.has_design:
            if self.payload.family is not family:
                raise ValidationError(
                    f"source was summarized under {self.payload.family.name}, "
                    f"got family {family.name}"
                )
        elif family is not GAUSSIAN:
            raise PayloadMismatchError(
                f"GaussianGram source summaries require the gaussian family, got {family.name}"
            )
        return family
