"""Small shared linear-algebra helpers.

All positive-definite solves in the package go through Cholesky; a failed
factorization is surfaced as RankDeficientError because every matrix in scope
is PD whenever the design matrices have full rank.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh, LinAlgError

from .errors import RankDeficientError


def spd_factor(A, what="matrix"):
    """Cholesky-factor a symmetric positive definite matrix."""
    try:
        return cho_factor(A, lower=True, check_finite=False)
    except LinAlgError:
        raise RankDeficientError(f"{what} is not positive definite") from None


def spd_solve(A, B, what="matrix"):
    """Solve A X = B for symmetric positive definite A."""
    return cho_solve(spd_factor(A, what), B, check_finite=False)


def spd_inverse(A, what="matrix"):
    return spd_solve(A, np.eye(A.shape[0]), what)


def symmetrize(A):
    """(A + A^T)/2, suppressing round-off asymmetry before eigensolves."""
    return 0.5 * (A + A.T)


def sym_eigh(A):
    """Eigendecomposition of a symmetrized matrix (ascending eigenvalues)."""
    return eigh(symmetrize(A), check_finite=False)


def gen_eigh(A, B, what="matrix pencil"):
    """Generalized symmetric eigenproblem A v = w B v with B PD.

    Returns ascending eigenvalues w and eigenvectors Q with Q^T B Q = I.
    """
    try:
        return eigh(symmetrize(A), symmetrize(B), check_finite=False)
    except LinAlgError:
        raise RankDeficientError(f"{what} is not positive definite") from None
