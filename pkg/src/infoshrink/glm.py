"""Maximum-likelihood fitting and information matrices.

The Gaussian path solves the normal equations directly; the Bernoulli path
runs iteratively reweighted least squares (Newton) from beta = 0 with a
step-halving safeguard so the log-likelihood never decreases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import spd_solve
from .data import Dataset, FullDesign, GaussianGram, SourceSummary, as_float_vector
from .errors import NonConvergenceError, SeparationError, ValidationError
from .families import GAUSSIAN, get_family

IRLS_TOL = 1e-10
IRLS_MAX_ITER = 100
IRLS_MAX_HALVINGS = 30
SEPARATION_THRESHOLD = 1e6


@dataclass(frozen=True)
class MleFit:
    """A fitted GLM: coefficients, dispersion, and the two p x p matrices."""

    beta_hat: np.ndarray
    gamma_hat: float
    info: np.ndarray  # v(beta_hat) = n^{-1} X A(X^T beta_hat) X^T
    gram: np.ndarray  # G = n^{-1} X X^T
    n: int
    p: int
    iterations: int
    converged: bool


def gram_matrix(data: Dataset):
    """Scaled Gram matrix G = n^{-1} X X^T (symmetric PD for full-rank designs).

    The product is returned as-is; rank deficiency surfaces as a structured
    error wherever the matrix is first factored or solved.
    """
    return (data.design @ data.design.T) / data.n


def weighted_info(family, data: Dataset, beta):
    """v(beta) = n^{-1} X A(X^T beta) X^T with A = diag{b''(X_i^T beta)}."""
    family = get_family(family)
    beta = as_float_vector(beta, "beta", length=data.p)
    a = family.variance(data.design.T @ beta)
    return (data.design * a) @ data.design.T / data.n


def fit_mle(family, data: Dataset) -> MleFit:
    """Maximum-likelihood fit; gamma_hat is sigma^2 (divisor n-p) or 1."""
    family = get_family(family)
    family.check_response(data.response)
    X, y, n, p = data.design, data.response, data.n, data.p
    G = gram_matrix(data)

    if family is GAUSSIAN:
        beta = spd_solve(X @ X.T, X @ y, "normal equations")
        resid = y - X.T @ beta
        sigma2 = float(resid @ resid) / (n - p) if n > p else 0.0
        return MleFit(beta, sigma2, info=G, gram=G, n=n, p=p, iterations=1, converged=True)

    # IRLS from beta = 0
    beta = np.zeros(p)
    kernel = family.loglik_kernel(X.T @ beta, y)
    for it in range(1, IRLS_MAX_ITER + 1):
        eta = X.T @ beta
        mu = family.mean(eta)
        a = family.variance(eta)
        score = X @ (y - mu)
        step = spd_solve((X * a) @ X.T, score, "weighted information")
        # halve the step until the log-likelihood stops decreasing
        scale = 1.0
        for _ in range(IRLS_MAX_HALVINGS):
            candidate = beta + scale * step
            new_kernel = family.loglik_kernel(X.T @ candidate, y)
            if new_kernel >= kernel - 1e-12 * (1.0 + abs(kernel)):
                break
            scale *= 0.5
        beta = beta + scale * step
        kernel = family.loglik_kernel(X.T @ beta, y)
        if np.max(np.abs(beta)) > SEPARATION_THRESHOLD:
            raise SeparationError("coefficients diverged during IRLS; data are separated")
        if scale * np.max(np.abs(step)) < IRLS_TOL:
            return MleFit(
                beta,
                family.dispersion(1.0),
                info=weighted_info(family, data, beta),
                gram=G,
                n=n,
                p=p,
                iterations=it,
                converged=True,
            )
    raise NonConvergenceError(f"IRLS did not converge in {IRLS_MAX_ITER} iterations")


def summarize_source(family, data: Dataset, gram_only=False):
    """Fit a source data set and package it as (SourceSummary, MleFit).

    With gram_only=True (Gaussian only) the summary keeps just n1, beta1_hat,
    G1 and sigma1^2 - the payload that travels without row-level data.
    """
    family = get_family(family)
    fit = fit_mle(family, data)
    if gram_only:
        if family is not GAUSSIAN:
            raise ValidationError("gram-only summaries are defined for the gaussian family")
        payload = GaussianGram(fit.gram, sigma_sq=fit.gamma_hat)
    else:
        payload = FullDesign(data.design, family, gamma1_hat=fit.gamma_hat)
    return SourceSummary(data.n, fit.beta_hat, payload), fit
