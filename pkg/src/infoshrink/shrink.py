"""The information-borrowing penalty and the dialed estimator.

The target log-likelihood is penalized by a scaled divergence between the
source model at beta1_hat and at the candidate beta:

    O(beta; lam) = n2^{-1} sum_i { y_i2 X_i2^T beta - b(X_i2^T beta) }
                   - (lam/n1) sum_i { h(t_i)(t_i - X_i1^T beta) + b(X_i1^T beta) - b(t_i) }

with t_i = X_i1^T beta1_hat.  Its negative gradient is the estimating function

    Psi(beta; lam) = n2^{-1} X2 {y2 - mu2(beta)} - lam n1^{-1} X1 {mu1(beta) - mu1(beta1_hat)}

whose root beta_tilde(lam) interpolates between the target MLE (lam = 0) and
the source fit (lam -> infinity).  The penalty is implemented exactly in this
dispersion-free form so that Psi = -grad O identically; kl_divergence exposes
the literal divergence (which carries a 1/d(gamma1) prefactor) separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import spd_solve
from .data import Dataset, SourceSummary, as_float_vector, as_spd_shape
from .errors import NonConvergenceError, ValidationError
from .families import GAUSSIAN, get_family
from .glm import MleFit, fit_mle, weighted_info

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 100
NEWTON_MAX_HALVINGS = 30


def check_lambda(lam):
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0.0:
        raise ValidationError(f"lambda must be a finite nonnegative scalar, got {lam!r}")
    return lam


@dataclass(frozen=True)
class DialEstimate:
    """beta_tilde(lam) with its dial value and solver/inference byproducts."""

    beta_tilde: np.ndarray
    lam: float
    iterations: int
    converged: bool
    S_at_solution: np.ndarray  # S(beta_tilde; lam)
    sandwich_var: np.ndarray  # evaluated at the target MLE, see inference module
    target_mle: np.ndarray
    gamma2_hat: float


def kl_penalty(source: SourceSummary, beta):
    """Raw penalty sum (no 1/d(gamma1) prefactor) as used inside O and Psi."""
    beta = as_float_vector(beta, "beta", length=source.p)
    family = source.payload.family if source.has_design else GAUSSIAN
    if family is GAUSSIAN:
        diff = source.beta1_hat - beta
        return 0.5 * source.n1 * float(diff @ source.gram() @ diff)
    X1 = source.require_design(family)
    theta_hat = X1.T @ source.beta1_hat
    theta = X1.T @ beta
    terms = (
        family.mean(theta_hat) * (theta_hat - theta)
        + family.cumulant(theta)
        - family.cumulant(theta_hat)
    )
    return float(np.sum(terms))


def kl_divergence(source: SourceSummary, beta):
    """Literal divergence of the source model at beta from the fit at beta1_hat.

    Equals the raw penalty divided by d(gamma1); nonnegative, and zero exactly
    at beta = beta1_hat.
    """
    if source.has_design:
        family = source.payload.family
        d1 = family.dispersion(source.payload.gamma1_hat)
    else:
        family = GAUSSIAN
        if source.payload.sigma_sq is None:
            raise ValidationError(
                "gram-only summary lacks sigma_sq; cannot scale the literal divergence"
            )
        d1 = source.payload.sigma_sq
    if d1 <= 0:
        raise ValidationError("source dispersion must be positive")
    return kl_penalty(source, beta) / d1


def objective(family, target: Dataset, source: SourceSummary, beta, lam):
    """Penalized objective O(beta; lam); concave in beta for lam >= 0."""
    lam = check_lambda(lam)
    family = source.check_family(family)
    beta = as_float_vector(beta, "beta", length=target.p)
    kernel = family.loglik_kernel(target.design.T @ beta, target.response)
    return kernel / target.n - (lam / source.n1) * kl_penalty(source, beta)


def _penalty_gradient(family, source: SourceSummary, beta):
    """Gradient of the scaled penalty: n1^{-1} X1 {mu1(beta) - mu1(beta1_hat)}."""
    if family is GAUSSIAN:
        return source.gram() @ (beta - source.beta1_hat)
    X1 = source.require_design(family)
    return X1 @ (family.mean(X1.T @ beta) - family.mean(X1.T @ source.beta1_hat)) / source.n1


def estimating_function(family, target: Dataset, source: SourceSummary, beta, lam):
    """Psi(beta; lam) = n2^{-1} X2 {y2 - mu2(beta)} - lam * penalty gradient."""
    lam = check_lambda(lam)
    family = source.check_family(family)
    beta = as_float_vector(beta, "beta", length=target.p)
    score = target.design @ (target.response - family.mean(target.design.T @ beta)) / target.n
    return score - lam * _penalty_gradient(family, source, beta)


def source_weighted_info(family, source: SourceSummary, beta):
    """v1(beta) = n1^{-1} X1 A(X1^T beta) X1^T (reduces to G1 for Gaussian)."""
    if family is GAUSSIAN:
        return source.gram()
    X1 = source.require_design(family)
    a = family.variance(X1.T @ beta)
    return (X1 * a) @ X1.T / source.n1


def penalized_hessian(family, target: Dataset, source: SourceSummary, beta, lam):
    """S(beta; lam) = V2(beta) + lam * v1(beta) = -dPsi/dbeta; symmetric PD."""
    lam = check_lambda(lam)
    family = source.check_family(family)
    beta = as_float_vector(beta, "beta", length=target.p)
    return weighted_info(family, target, beta) + lam * source_weighted_info(family, source, beta)


def _sandwich(family, target, source, beta, lam, gamma2):
    """n2^{-1} d(gamma2) S^{-1}(beta;lam) V2(beta) S^{-1}(beta;lam)."""
    V2 = weighted_info(family, target, beta)
    S = V2 + lam * source_weighted_info(family, source, beta)
    inner = spd_solve(S, V2, "penalized hessian")  # S^{-1} V2
    cov = spd_solve(S, inner.T, "penalized hessian")  # S^{-1} V2 S^{-1}
    return family.dispersion(gamma2) / target.n * 0.5 * (cov + cov.T)


def solve_dial_estimate(family, target: Dataset, source: SourceSummary, lam,
                        target_fit: MleFit | None = None) -> DialEstimate:
    """Solve Psi(beta; lam) = 0.

    Gaussian: closed form (G2 + lam G1)^{-1} (G2 beta2_hat + lam G1 beta1_hat).
    Otherwise: Newton iterations from the target MLE with step halving on any
    increase of ||Psi||.
    """
    lam = check_lambda(lam)
    family = source.check_family(family)
    if source.p != target.p:
        from .errors import DimensionMismatchError

        raise DimensionMismatchError("target and source disagree on p")
    if target_fit is None:
        target_fit = fit_mle(family, target)
    beta2 = target_fit.beta_hat

    if family is GAUSSIAN:
        G1, G2 = source.gram(), target_fit.gram
        if lam == 0.0:
            beta = beta2.copy()
        else:
            beta = spd_solve(G2 + lam * G1, G2 @ beta2 + lam * (G1 @ source.beta1_hat))
        iterations, converged = 0, True
    else:
        beta = beta2.copy()
        psi = estimating_function(family, target, source, beta, lam)
        best = np.max(np.abs(psi))
        iterations = 0
        converged = best < NEWTON_TOL
        while not converged:
            iterations += 1
            if iterations > NEWTON_MAX_ITER:
                raise NonConvergenceError(
                    f"Newton solver did not converge in {NEWTON_MAX_ITER} iterations"
                )
            S = penalized_hessian(family, target, source, beta, lam)
            step = spd_solve(S, psi, "penalized hessian")
            scale = 1.0
            for _ in range(NEWTON_MAX_HALVINGS):
                candidate = beta + scale * step
                psi_new = estimating_function(family, target, source, candidate, lam)
                if np.max(np.abs(psi_new)) <= best:
                    break
                scale *= 0.5
            beta = beta + scale * step
            psi = estimating_function(family, target, source, beta, lam)
            best = np.max(np.abs(psi))
            converged = best < NEWTON_TOL

    S_sol = penalized_hessian(family, target, source, beta, lam)
    sandwich = _sandwich(family, target, source, beta2, lam, target_fit.gamma_hat)
    return DialEstimate(
        beta_tilde=beta,
        lam=lam,
        iterations=iterations,
        converged=converged,
        S_at_solution=S_sol,
        sandwich_var=sandwich,
        target_mle=beta2,
        gamma2_hat=target_fit.gamma_hat,
    )


def shrink_weight_matrix(target_gram, source_gram, n1, n2, lam):
    """W_lam = (G2 + lam G1)^{-1} G2, so beta_tilde = W beta2_hat + (I-W) beta1_hat.

    n1 and n2 are accepted for call-site symmetry with unscaled-cross-product
    formulations; with scaled Grams they cancel.
    """
    lam = check_lambda(lam)
    if int(n1) < 1 or int(n2) < 1:
        raise ValidationError("n1 and n2 must be positive counts")
    G2 = as_spd_shape(target_gram, "target gram")
    G1 = as_spd_shape(source_gram, "source gram", size=G2.shape[0])
    return spd_solve(G2 + lam * G1, G2, "penalized gram")
