"""Plug-in MSE curves, automatic dial selection, and dial bounds.

For Gaussian targets the estimated risk of beta_tilde(lam) is

    n2^{-1} sigma2_hat trace{S^{-2}(lam) G2} + lam^2 trace{G1 S^{-2}(lam) G1 delta_sq_hat}

with S(lam) = G2 + lam*G1 and delta_sq_hat a bias-adjusted, PSD-truncated
estimate of delta delta^T.  For general families the analogous large-sample
risk (on the sqrt(n2)-standardized scale) is

    d(gamma2_hat) trace{S^{-2}(b2;lam) V2(b2)}
      + n2 n1^{-2} lam^2 Delta^T X1^T S^{-2}(b2;lam) X1 Delta

evaluated at the target MLE b2, where Delta collects the source-scale mean
shifts h(X_i1^T b2) - h(X_i1^T beta1_hat).  The selected dial lambda_tilde is
the minimizer over a log grid with golden-section refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import gen_eigh, spd_inverse, spd_solve, sym_eigh
from .data import Dataset, SourceSummary, as_float_vector, as_spd_shape
from .errors import ValidationError, ZeroDeltaError
from .families import GAUSSIAN, get_family
from .glm import MleFit, weighted_info
from .shrink import check_lambda, source_weighted_info

GRID_POINTS = 200
GRID_FLOOR = 1e-8
DEFAULT_BRACKET = (1e-8, 1e3)
REFINE_REL_TOL = 1e-6

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class MseCurve:
    """A populated estimated-risk curve and the dial selected on it."""

    lambda_grid: np.ndarray
    mse_values: np.ndarray
    lambda_tilde: float
    at_zero: float
    mse_at_tilde: float
    lambda_lower_bound: float | None = None


def delta_sq_hat(target_fit: MleFit, source: SourceSummary):
    """Bias-adjusted outer-product estimate of delta delta^T, truncated to PSD.

    Starts from (b2-b1)(b2-b1)^T - sigma2_hat n2^{-1} G2^{-1} and zeroes any
    negative eigenvalues; if every eigenvalue is negative the unadjusted outer
    product is returned instead.
    """
    dp = target_fit.beta_hat - source.beta1_hat
    outer = np.outer(dp, dp)
    if target_fit.gamma_hat == 0.0:
        return outer
    raw = outer - (target_fit.gamma_hat / target_fit.n) * spd_inverse(target_fit.gram)
    w, V = sym_eigh(raw)
    if np.all(w < 0.0):
        return outer
    w = np.maximum(w, 0.0)
    out = (V * w) @ V.T
    return 0.5 * (out + out.T)


def estimated_mse_gaussian(target_fit: MleFit, source: SourceSummary, lam, delta_sq=None):
    """Plug-in risk of the Gaussian dialed estimator at a given lam."""
    lam = check_lambda(lam)
    if delta_sq is None:
        delta_sq = delta_sq_hat(target_fit, source)
    G1, G2 = source.gram(), target_fit.gram
    S = G2 + lam * G1
    T = spd_solve(S, G2, "penalized gram")
    variance = target_fit.gamma_hat / target_fit.n * float(np.trace(spd_solve(S, T)))
    B = spd_solve(S, G1)  # S^{-1} G1
    bias = lam * lam * float(np.trace(B.T @ B @ delta_sq))
    return variance + bias


def estimated_amse_glm(family, target: Dataset, target_fit: MleFit, source: SourceSummary, lam):
    """Plug-in large-sample risk (sqrt(n2)-scale) of the dialed estimator."""
    lam = check_lambda(lam)
    family = source.check_family(family)
    X1 = source.require_design(family)
    b2 = target_fit.beta_hat
    V2 = weighted_info(family, target, b2)
    v1 = source_weighted_info(family, source, b2)
    S = V2 + lam * v1
    T = spd_solve(S, V2, "penalized information")
    term1 = family.dispersion(target_fit.gamma_hat) * float(np.trace(spd_solve(S, T)))
    delta_vec = family.mean(X1.T @ b2) - family.mean(X1.T @ source.beta1_hat)
    w = X1 @ delta_vec
    z = spd_solve(S, w)
    term2 = target_fit.n / source.n1**2 * lam * lam * float(z @ z)
    return term1 + term2


# ---------------------------------------------------------------------------
# Fast curve factories.  These evaluate the same functions as the two
# operations above but diagonalize the matrix pencil once, so that a curve
# evaluation costs O(p^2) instead of O(p^3).  Tests pin factory == direct.
# ---------------------------------------------------------------------------

def gaussian_mse_curve(target_fit: MleFit, source: SourceSummary, delta_sq=None):
    """Return lam -> estimated_mse_gaussian(target_fit, source, lam)."""
    if delta_sq is None:
        delta_sq = delta_sq_hat(target_fit, source)
    G1, G2 = source.gram(), target_fit.gram
    w, Q = gen_eigh(G1, G2)  # Q^T G2 Q = I, Q^T G1 Q = diag(w)
    a = np.sum(Q * Q, axis=0)
    P = Q.T @ Q
    H = Q.T @ G2  # = Q^{-1}
    E = H @ delta_sq @ H.T
    C = np.outer(w, w) * P * E.T
    sig_over_n = target_fit.gamma_hat / target_fit.n

    def curve(lam):
        denom = 1.0 + lam * w
        t1 = sig_over_n * float(np.sum(a / (denom * denom)))
        t2 = lam * lam * float(np.sum(C / np.outer(denom, denom)))
        return t1 + t2

    return curve


def glm_amse_curve(family, target: Dataset, target_fit: MleFit, source: SourceSummary):
    """Return lam -> estimated_amse_glm(family, target, target_fit, source, lam)."""
    family = source.check_family(family)
    X1 = source.require_design(family)
    b2 = target_fit.beta_hat
    V2 = weighted_info(family, target, b2)
    v1 = source_weighted_info(family, source, b2)
    w, Q = gen_eigh(v1, V2)
    a = np.sum(Q * Q, axis=0)
    P = Q.T @ Q
    delta_vec = family.mean(X1.T @ b2) - family.mean(X1.T @ source.beta1_hat)
    z = Q.T @ (X1 @ delta_vec)
    C = np.outer(z, z) * P
    d2 = family.dispersion(target_fit.gamma_hat)
    factor = target_fit.n / source.n1**2

    def curve(lam):
        denom = 1.0 + lam * w
        t1 = d2 * float(np.sum(a / (denom * denom)))
        t2 = factor * lam * lam * float(np.sum(C / np.outer(denom, denom)))
        return t1 + t2

    return curve


def select_lambda(curve_fn, bracket=DEFAULT_BRACKET):
    """Minimize an estimated-risk curve over a log-spaced bracket.

    A 200-point log grid scan locates the argmin basin; golden-section search
    in log-lambda then refines it to a relative tolerance of 1e-6.  Ties (flat
    stretches) resolve to the smallest minimizing lambda.  Returns
    (lambda_tilde, MseCurve).
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (lo >= 0.0 and hi > lo):
        raise ValidationError(f"bracket must satisfy 0 <= lo < hi, got {bracket!r}")
    lo = max(lo, GRID_FLOOR)
    grid = np.geomspace(lo, hi, GRID_POINTS)
    values = np.array([curve_fn(l) for l in grid])
    i = int(np.argmin(values))
    best_lam, best_val = float(grid[i]), float(values[i])

    # golden-section refinement between the grid neighbors of the argmin
    a = math.log(grid[max(i - 1, 0)])
    b = math.log(grid[min(i + 1, GRID_POINTS - 1)])
    if b > a:
        c = b - _INV_PHI * (b - a)
        d = a + _INV_PHI * (b - a)
        yc = curve_fn(math.exp(c))
        yd = curve_fn(math.exp(d))
        for t, y in ((c, yc), (d, yd)):
            if y < best_val or (y == best_val and math.exp(t) < best_lam):
                best_lam, best_val = math.exp(t), y
        while b - a > REFINE_REL_TOL:
            if yc <= yd:  # prefer the left (smaller lambda) side on ties
                b, d, yd = d, c, yc
                c = b - _INV_PHI * (b - a)
                yc = curve_fn(math.exp(c))
            else:
                a, c, yc = c, d, yd
                d = a + _INV_PHI * (b - a)
                yd = curve_fn(math.exp(d))
            if yc < best_val or (yc == best_val and math.exp(c) < best_lam):
                best_lam, best_val = math.exp(c), yc
            if yd < best_val or (yd == best_val and math.exp(d) < best_lam):
                best_lam, best_val = math.exp(d), yd

    curve = MseCurve(
        lambda_grid=grid,
        mse_values=values,
        lambda_tilde=best_lam,
        at_zero=float(curve_fn(0.0)),
        mse_at_tilde=best_val,
    )
    return best_lam, curve


def select_lambda_gaussian(target_fit: MleFit, source: SourceSummary, bracket=DEFAULT_BRACKET):
    """Select the dial on the Gaussian plug-in curve; fills the lower-bound diagnostic."""
    delta_sq = delta_sq_hat(target_fit, source)
    lam, curve = select_lambda(gaussian_mse_curve(target_fit, source, delta_sq), bracket)
    try:
        curve.lambda_lower_bound = lambda_bound_gaussian(
            target_fit, source, target_fit.beta_hat - source.beta1_hat,
            target_fit.gamma_hat, target_fit.n,
        )
    except (ZeroDeltaError, ValidationError):
        curve.lambda_lower_bound = None
    return lam, curve


def select_lambda_glm(family, target: Dataset, target_fit: MleFit, source: SourceSummary,
                      bracket=DEFAULT_BRACKET):
    """Select the dial on the general plug-in curve; fills the lower-bound diagnostic."""
    lam, curve = select_lambda(glm_amse_curve(family, target, target_fit, source), bracket)
    try:
        curve.lambda_lower_bound = lambda_bound_glm(
            family, target, source, target_fit.beta_hat,
            n2=target_fit.n, gamma2=target_fit.gamma_hat,
        )
    except (ZeroDeltaError, ValidationError):
        curve.lambda_lower_bound = None
    return lam, curve


def lambda_bound_gaussian(target_fit: MleFit, source: SourceSummary, delta, sigma2, n2):
    """Lower bound on the risk-optimal dial for a Gaussian target.

    (sigma2/n2) * min_r(kappa_r / g_r2) / max_r delta_r^2, pairing the
    decreasing eigenvalues kappa of G2^{1/2} G1^{-1} G2^{1/2} with the
    increasing eigenvalues g of G2.
    """
    delta = as_float_vector(delta, "delta", length=target_fit.p)
    dmax = float(np.max(delta * delta))
    if dmax == 0.0:
        raise ZeroDeltaError("delta is zero: every positive dial value improves the risk")
    if sigma2 <= 0 or n2 < 1:
        raise ValidationError("sigma2 must be positive and n2 a positive count")
    G1, G2 = source.gram(), target_fit.gram
    kappa = gen_eigh(G2, G1)[0][::-1]  # eigenvalues of G2^{1/2} G1^{-1} G2^{1/2}, decreasing
    g2 = sym_eigh(G2)[0]  # increasing
    return float(sigma2) / float(n2) * float(np.min(kappa / g2)) / dmax


def lambda_bound_glm(family, target: Dataset, source: SourceSummary, beta_ref, n2=None,
                     gamma2=1.0):
    """General-family analogue of lambda_bound_gaussian, evaluated at beta_ref."""
    family = source.check_family(family)
    X1 = source.require_design(family)
    beta_ref = as_float_vector(beta_ref, "beta_ref", length=target.p)
    n2 = target.n if n2 is None else int(n2)
    v2 = weighted_info(family, target, beta_ref)
    v1 = source_weighted_info(family, source, beta_ref)
    delta_vec = family.mean(X1.T @ beta_ref) - family.mean(X1.T @ source.beta1_hat)
    u = spd_solve(v1, X1 @ delta_vec) / source.n1  # v1^{-1} X1 Delta / n1
    denom = float(np.max(u * u))
    if denom == 0.0:
        raise ZeroDeltaError("source-scale discrepancy is zero at beta_ref")
    kappa = gen_eigh(v2, v1)[0][::-1]  # decreasing eigenvalues of v2^{1/2} v1^{-1} v2^{1/2}
    g2 = sym_eigh(v2)[0]  # increasing
    d2 = family.dispersion(gamma2)
    return d2 / float(n2) * float(np.min(kappa / g2)) / denom


def analytic_mse_gaussian(G1, G2, sigma2, n2, delta, lam):
    """Exact risk decomposition of the Gaussian dialed estimator.

    Returns (total, variance_part, bias_part) with
    variance_part = n2^{-1} sigma2 trace{S^{-2}(lam) G2} and
    bias_part = lam^2 delta^T G1 S^{-2}(lam) G1 delta.
    """
    lam = check_lambda(lam)
    G1 = as_spd_shape(G1, "G1")
    G2 = as_spd_shape(G2, "G2", size=G1.shape[0])
    delta = as_float_vector(delta, "delta", length=G1.shape[0])
    S = G2 + lam * G1
    T = spd_solve(S, G2, "penalized gram")
    variance = float(sigma2) / float(n2) * float(np.trace(spd_solve(S, T)))
    u = spd_solve(S, G1 @ delta)
    bias = lam * lam * float(u @ u)
    return variance + bias, variance, bias
