"""Sandwich variance and confidence intervals for the dialed estimator.

The dialed estimator solves a penalized score equation whose Jacobian is
S(beta; lam) = V2(beta) + lam*v1(beta) while the score variability comes from
the target data alone, d(gamma2) V2(beta) / n2.  The resulting sandwich

    n2^{-1} d(gamma2) S^{-1}(beta; lam) V2(beta) S^{-1}(beta; lam)

is never wider than the classical inverse-information variance of the target
MLE, coordinatewise, because S dominates V2 in the Loewner order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from ._linalg import symmetrize
from .data import Dataset, SourceSummary, as_spd_shape
from .errors import RankDeficientError, ValidationError
from .families import GAUSSIAN, get_family
from .glm import MleFit, fit_mle
from .shrink import DialEstimate, _sandwich, check_lambda


@dataclass(frozen=True)
class IntervalSet:
    """Coordinatewise confidence intervals with their building blocks."""

    lower: np.ndarray
    upper: np.ndarray
    level: float
    center: np.ndarray
    se: np.ndarray

    @property
    def half_width(self):
        return 0.5 * (self.upper - self.lower)


def _check_level(level):
    level = float(level)
    if not 0.0 < level < 1.0:
        raise ValidationError(f"level must lie strictly between 0 and 1, got {level}")
    return level


def sandwich_variance(family, target: Dataset, source: SourceSummary, beta, lam,
                      gamma2=None):
    """Sandwich covariance of the dialed estimator at (beta, lam).

    When gamma2 is omitted it defaults to the target MLE dispersion estimate
    (sigma2_hat for Gaussian responses, 1 otherwise).
    """
    family = get_family(family)
    lam = check_lambda(lam)
    source.check_family(family)
    if gamma2 is None:
        gamma2 = fit_mle(family, target).gamma_hat if family is GAUSSIAN else 1.0
    return _sandwich(family, target, source, np.asarray(beta, dtype=float), lam, gamma2)


def confidence_intervals(estimate: DialEstimate, level=0.95) -> IntervalSet:
    """Normal-quantile intervals from a solved dial estimate's sandwich variance."""
    level = _check_level(level)
    if not estimate.converged:
        raise ValidationError("cannot form intervals from a non-converged estimate")
    se = np.sqrt(np.diag(estimate.sandwich_var))
    z = ndtri(0.5 + level / 2.0)
    center = estimate.beta_tilde
    return IntervalSet(center - z * se, center + z * se, level, center.copy(), se)


def wald_intervals(fit: MleFit, level=0.95) -> IntervalSet:
    """Classical inverse-information intervals around an MLE."""
    level = _check_level(level)
    cov = fit.gamma_hat / fit.n * np.linalg.inv(symmetrize(fit.info))
    se = np.sqrt(np.diag(symmetrize(cov)))
    z = ndtri(0.5 + level / 2.0)
    center = fit.beta_hat
    return IntervalSet(center - z * se, center + z * se, level, center.copy(), se)


def debias_identity_residual(G1, G2, lam):
    """Max-abs residual of {I - lam S^{-1} G1}^{-1} S^{-1} G2 - I with S = G2 + lam*G1.

    The product is the identity for every lam >= 0 and every SPD pair, which is
    what makes the dialed estimator exactly debiasable in the Gaussian case.
    """
    lam = check_lambda(lam)
    G1 = as_spd_shape(G1, "G1")
    G2 = as_spd_shape(G2, "G2", size=G1.shape[0])
    p = G1.shape[0]
    if lam == 0.0:
        return 0.0  # the product is S^{-1} S with S = G2
    S = G2 + lam * G1
    try:
        inner = np.linalg.solve(S, np.hstack([G1, G2]))
        A = np.eye(p) - lam * inner[:, :p]
        prod = np.linalg.solve(A, inner[:, p:])
    except np.linalg.LinAlgError as exc:
        raise RankDeficientError(f"debias factor is singular: {exc}") from exc
    return float(np.max(np.abs(prod - np.eye(p))))
