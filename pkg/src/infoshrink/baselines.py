"""Competitor estimators: pooled MLE and two weight-matrix combiners.

Both combiners form W beta2_hat + (I - W) beta1_hat with a data-driven p x p
weight matrix W.  The first indexes W by a ridge-style tuning parameter on the
unscaled Gram matrices; the second builds a single W from the two estimated
information matrices and the coefficient discrepancy.
"""

from __future__ import annotations

import numpy as np

from ._linalg import gen_eigh, spd_inverse, spd_solve
from .data import Dataset, SourceSummary
from .dial import DEFAULT_BRACKET, delta_sq_hat, select_lambda
from .errors import DimensionMismatchError, PayloadMismatchError
from .families import get_family
from .glm import MleFit, fit_mle
from .multisource import concat_sources
from .shrink import check_lambda


def pooled_mle(family, target: Dataset, source_full: Dataset):
    """Coefficients of the MLE on the row-concatenated target and source data."""
    family = get_family(family)
    if isinstance(source_full, SourceSummary):
        raise PayloadMismatchError(
            "pooled fitting needs individual-level source data, not a summary"
        )
    if target.p != source_full.p:
        raise DimensionMismatchError(
            f"target has {target.p} coefficients but source has {source_full.p}"
        )
    return fit_mle(family, concat_sources([target, source_full])).beta_hat


def _weight_combination(W, target_beta, source_beta):
    return W @ target_beta + (np.eye(len(target_beta)) - W) @ source_beta


def gram_weight_matrix(target_fit: MleFit, source: SourceSummary, lam):
    """Weight matrix {U1 + lam(U1 + U2)}^{-1} (U1 + lam U2), U_j = X_j X_j^T."""
    lam = check_lambda(lam)
    U1 = source.gram() * source.n1
    U2 = target_fit.gram * target_fit.n
    return spd_solve(U1 + lam * (U1 + U2), U1 + lam * U2, "combined gram")


def chen_owen_shi(target_fit: MleFit, source: SourceSummary, lam):
    """Gram-weighted combination of the two MLEs at tuning value lam.

    lam = 0 returns the target MLE; lam -> infinity approaches the pooled
    least-squares combination (U1 + U2)^{-1}(U1 beta1_hat + U2 beta2_hat).
    """
    if target_fit.p != source.p:
        raise DimensionMismatchError(
            f"target has {target_fit.p} coefficients but source has {source.p}"
        )
    W = gram_weight_matrix(target_fit, source, lam)
    return _weight_combination(W, target_fit.beta_hat, source.beta1_hat)


def cos_mse_curve(target_fit: MleFit, source: SourceSummary, delta_sq=None):
    """Estimated-risk curve for the gram-weighted combination.

    f(lam) = sigma2_hat/n2 trace{W G2^{-1} W^T} + trace{(I-W) delta_sq (I-W)^T}
    evaluated in the eigenbasis of the pencil (U1, U1+U2) so each call costs
    O(p^2).
    """
    if delta_sq is None:
        delta_sq = delta_sq_hat(target_fit, source)
    U1 = source.gram() * source.n1
    U2 = target_fit.gram * target_fit.n
    m, Q = gen_eigh(U1, U1 + U2)  # Q^T (U1+U2) Q = I, Q^T U1 Q = diag(m)
    Qinv = Q.T @ (U1 + U2)
    P = Q.T @ Q
    G2inv = spd_inverse(target_fit.gram)
    PF = P * (Qinv @ G2inv @ Qinv.T).T
    PE = P * (Qinv @ delta_sq @ Qinv.T).T
    sig_over_n = target_fit.gamma_hat / target_fit.n

    def curve(lam):
        wa = (m + lam * (1.0 - m)) / (m + lam)
        wb = lam * m / (m + lam)
        return sig_over_n * float(wa @ PF @ wa) + float(wb @ PE @ wb)

    return curve


def chen_owen_shi_lambda_hat(target_fit: MleFit, source: SourceSummary,
                             bracket=DEFAULT_BRACKET, delta_sq=None):
    """Tuning value minimizing the gram-weighted combination's estimated risk."""
    lam, _ = select_lambda(cos_mse_curve(target_fit, source, delta_sq), bracket)
    return lam


def info_weight_matrix(target_fit: MleFit, source_fit: MleFit):
    """Weight matrix {D + C1 + C2}^{-1} (D + C1) from two fitted models.

    D is the outer product of the coefficient discrepancy and C_j the
    estimated covariance {X_j A_j X_j^T}^{-1} of each MLE.
    """
    if target_fit.p != source_fit.p:
        raise DimensionMismatchError(
            f"target has {target_fit.p} coefficients but source has {source_fit.p}"
        )
    d = source_fit.beta_hat - target_fit.beta_hat
    D = np.outer(d, d)
    C1 = spd_inverse(source_fit.info * source_fit.n)
    C2 = spd_inverse(target_fit.info * target_fit.n)
    return spd_solve(D + C1 + C2, D + C1, "combined precision")


def zheng_weight_estimator(target_fit: MleFit, source_fit_full: MleFit):
    """Information-weighted combination of the target and source MLEs."""
    W = info_weight_matrix(target_fit, source_fit_full)
    return _weight_combination(W, target_fit.beta_hat, source_fit_full.beta_hat)
