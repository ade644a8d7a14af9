"""Plug-in risk curves, automatic dial selection, and dial lower bounds."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import _fixtures as fx
import _helpers as h
import _oracles as O
from infoshrink.data import Dataset, FullDesign, GaussianGram, SourceSummary
from infoshrink.dial import (
    DEFAULT_BRACKET,
    GRID_POINTS,
    analytic_mse_gaussian,
    delta_sq_hat,
    estimated_amse_glm,
    estimated_mse_gaussian,
    gaussian_mse_curve,
    glm_amse_curve,
    lambda_bound_gaussian,
    lambda_bound_glm,
    select_lambda,
    select_lambda_gaussian,
    select_lambda_glm,
)
from infoshrink.errors import ValidationError, ZeroDeltaError
from infoshrink.glm import MleFit, fit_mle, summarize_source


def toy_fit(gram, n, gamma=1.0, beta=None):
    gram = np.asarray(gram, dtype=float)
    p = gram.shape[0]
    beta = np.zeros(p) if beta is None else np.asarray(beta, dtype=float)
    return MleFit(beta_hat=beta, gamma_hat=float(gamma), info=gram.copy(), gram=gram,
                  n=int(n), p=p, iterations=0, converged=True)


def gram_source(gram, beta1_hat, n1=50):
    return SourceSummary(n1, np.asarray(beta1_hat, dtype=float), GaussianGram(np.asarray(gram, dtype=float)))


# ---------------------------------------------------------------- delta_sq_hat


def test_delta_sq_psd_input_unchanged():
    # p=1 is the one case where the bias-adjusted matrix can stay PSD
    fit = toy_fit(np.eye(1), n=100, gamma=0.1, beta=np.array([2.0]))
    source = gram_source(np.eye(1), np.array([0.0]))
    raw = 4.0 - 0.1 / 100 * 1.0
    assert delta_sq_hat(fit, source)[0, 0] == pytest.approx(raw, abs=1e-12)


def test_delta_sq_zero_dispersion_returns_outer():
    rng = np.random.default_rng(5)
    X = np.vstack([np.ones(20), rng.standard_normal((2, 20))])
    beta0 = np.array([0.5, -1.0, 2.0])
    fit = fit_mle("gaussian", Dataset(X, X.T @ beta0))
    source = gram_source(np.eye(3), beta0 + np.array([0.3, -0.1, 0.2]))
    dp = fit.beta_hat - source.beta1_hat
    np.testing.assert_allclose(delta_sq_hat(fit, source), np.outer(dp, dp),
                               rtol=0.0, atol=1e-12)


def test_delta_sq_all_negative_falls_back_to_outer():
    # identical coefficients: the adjusted matrix is negative definite, the
    # fallback returns the (zero) outer product
    fit = toy_fit(np.eye(2), n=10, gamma=1.0, beta=np.array([0.7, -0.2]))
    source = gram_source(np.eye(2), np.array([0.7, -0.2]))
    np.testing.assert_array_equal(delta_sq_hat(fit, source), np.zeros((2, 2)))


def test_delta_sq_matches_reference_clip():
    c = h.case("GA")
    np.testing.assert_allclose(delta_sq_hat(c.target_fit, c.source), O.GA_DELTA_SQ,
                               rtol=0.0, atol=1e-12)


@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_delta_sq_always_psd(seed):
    rng = np.random.default_rng(seed)
    p = 3
    fit = toy_fit(fx.spd_matrix(rng, p), n=40, gamma=float(rng.uniform(0.2, 2.0)),
                  beta=rng.normal(size=p))
    source = gram_source(fx.spd_matrix(rng, p), rng.normal(size=p))
    D = delta_sq_hat(fit, source)
    np.testing.assert_allclose(D, D.T, rtol=0.0, atol=1e-12)
    assert np.linalg.eigvalsh(D).min() >= -1e-12


# ------------------------------------------------------- estimated risk curves


def test_gaussian_mse_at_zero_is_classical_variance():
    c = h.case("GA")
    classical = c.target_fit.gamma_hat / c.target.n * np.trace(
        np.linalg.inv(c.target_fit.gram)
    )
    assert estimated_mse_gaussian(c.target_fit, c.source, 0.0) == pytest.approx(
        classical, rel=1e-12
    )


def test_gaussian_mse_scalar_identity_case():
    p, n2 = 4, 10
    fit = toy_fit(np.eye(p), n=n2, gamma=1.0)
    source = gram_source(np.eye(p), np.zeros(p))
    delta_sq = np.zeros((p, p))
    delta_sq[0, 0] = 1.0
    for lam in (0.0, 0.3, 1.0, 4.2):
        expected = (p / n2 + lam**2) / (1 + lam) ** 2
        got = estimated_mse_gaussian(fit, source, lam, delta_sq=delta_sq)
        assert got == pytest.approx(expected, rel=1e-12)


def test_gaussian_mse_matches_reference_values():
    c = h.case("GA")
    assert estimated_mse_gaussian(c.target_fit, c.source, 0.3) == pytest.approx(
        O.GA_MSE_L03, rel=1e-12
    )
    assert estimated_mse_gaussian(c.target_fit, c.source, 1.7) == pytest.approx(
        O.GA_MSE_L17, rel=1e-12
    )
    assert estimated_mse_gaussian(c.target_fit, c.source, 0.0) == pytest.approx(
        O.GA_MSE_AT0, rel=1e-12
    )


def test_glm_amse_reduces_to_gaussian_curve():
    c = h.case("GA")
    dp = c.target_fit.beta_hat - c.source.beta1_hat
    outer = np.outer(dp, dp)
    for lam in (0.0, 0.4, 2.0):
        glm_val = estimated_amse_glm("gaussian", c.target, c.target_fit, c.source, lam)
        gaussian_val = estimated_mse_gaussian(c.target_fit, c.source, lam, delta_sq=outer)
        assert glm_val == pytest.approx(c.target.n * gaussian_val, rel=1e-12)


def test_glm_amse_zero_bias_at_matching_coefficients():
    c = h.case("BA")
    matched = SourceSummary(c.source.n1, c.target_fit.beta_hat,
                            FullDesign(c.source_data.design, "bernoulli"))
    grid = np.geomspace(1e-4, 1e3, 40)
    vals = [estimated_amse_glm("bernoulli", c.target, c.target_fit, matched, lam)
            for lam in grid]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_glm_amse_matches_reference_loop():
    c = h.case("BB")
    assert estimated_amse_glm("bernoulli", c.target, c.target_fit, c.source, 1.0) == (
        pytest.approx(O.BB_AMSE_LAM1, rel=1e-10)
    )


def test_curve_factories_match_direct_evaluation():
    c = h.case("GA")
    curve = gaussian_mse_curve(c.target_fit, c.source)
    for lam in (0.0, 0.05, 0.7, 13.0):
        assert curve(lam) == pytest.approx(
            estimated_mse_gaussian(c.target_fit, c.source, lam), rel=1e-10
        )
    b = h.case("BB")
    bcurve = glm_amse_curve("bernoulli", b.target, b.target_fit, b.source)
    for lam in (0.0, 0.05, 0.7, 13.0):
        assert bcurve(lam) == pytest.approx(
            estimated_amse_glm("bernoulli", b.target, b.target_fit, b.source, lam),
            rel=1e-10,
        )


# ------------------------------------------------------------ dial selection


def test_select_lambda_on_known_quadratic():
    lam, curve = select_lambda(lambda l: (l - 3.0) ** 2 + 1.0, (1e-8, 1e3))
    assert lam == pytest.approx(3.0, abs=1e-5)
    assert curve.mse_at_tilde == pytest.approx(1.0, abs=1e-9)
    assert curve.at_zero == pytest.approx(10.0, rel=1e-14)
    assert len(curve.lambda_grid) == GRID_POINTS


def test_select_lambda_tie_resolves_to_smallest():
    lam, _ = select_lambda(lambda l: 5.0, (1e-8, 10.0))
    assert lam == pytest.approx(1e-8, rel=1e-12)


def test_select_lambda_bracket_validation():
    with pytest.raises(ValidationError):
        select_lambda(lambda l: l, (-1.0, 2.0))
    with pytest.raises(ValidationError):
        select_lambda(lambda l: l, (3.0, 2.0))


def test_selected_dial_matches_dense_grid_gaussian():
    for name, dense, step in [
        ("GA", O.GA_LAMBDA_DENSE, O.GA_LAMBDA_DENSE_STEP),
        ("GB", O.GB_LAMBDA_DENSE, O.GB_LAMBDA_DENSE_STEP),
    ]:
        c = h.case(name)
        lam, curve = select_lambda_gaussian(c.target_fit, c.source)
        assert abs(math.log(lam) - math.log(dense)) <= math.log(step)
        assert curve.lambda_tilde == lam
        assert curve.mse_at_tilde <= curve.mse_values.min() + 1e-15


def test_selected_dial_matches_dense_grid_bernoulli():
    c = h.case("BB")
    lam, _ = select_lambda_glm("bernoulli", c.target, c.target_fit, c.source)
    assert abs(math.log(lam) - math.log(O.BB_LAMBDA_DENSE)) <= math.log(O.BB_LAMBDA_DENSE_STEP)


def test_selected_dial_fills_lower_bound_diagnostic():
    c = h.case("GA")
    _, curve = select_lambda_gaussian(c.target_fit, c.source)
    assert curve.lambda_lower_bound == pytest.approx(O.GA_LAMBDA_BOUND, rel=1e-10)


@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_selected_dial_stays_in_bracket(seed):
    rng = np.random.default_rng(seed)
    p = 3
    fit = toy_fit(fx.spd_matrix(rng, p), n=30, gamma=float(rng.uniform(0.2, 2.0)),
                  beta=rng.normal(size=p))
    source = gram_source(fx.spd_matrix(rng, p), rng.normal(size=p))
    lam, curve = select_lambda_gaussian(fit, source)
    assert DEFAULT_BRACKET[0] <= lam <= DEFAULT_BRACKET[1] * (1 + 1e-12)
    assert curve.mse_at_tilde <= curve.at_zero + 1e-15


# ------------------------------------------------------------------- bounds


def test_bound_identity_case():
    fit = toy_fit(np.eye(4), n=10, gamma=1.0)
    source = gram_source(np.eye(4), np.zeros(4))
    delta = np.array([1.0, 0.0, 0.0, 0.0])
    assert lambda_bound_gaussian(fit, source, delta, 1.0, 10) == pytest.approx(0.1, rel=1e-12)


def test_bound_scales_inverse_quadratically_in_delta():
    c = h.case("GA")
    delta = c.target_fit.beta_hat - c.source.beta1_hat
    b1 = lambda_bound_gaussian(c.target_fit, c.source, delta, 1.0, c.target.n)
    b3 = lambda_bound_gaussian(c.target_fit, c.source, 3.0 * delta, 1.0, c.target.n)
    assert b3 == pytest.approx(b1 / 9.0, rel=1e-12)


def test_bound_matches_reference_and_improves_risk():
    c = h.case("GA")
    delta = c.target_fit.beta_hat - c.source.beta1_hat
    bound = lambda_bound_gaussian(c.target_fit, c.source, delta,
                                  c.target_fit.gamma_hat, c.target.n)
    assert bound == pytest.approx(O.GA_LAMBDA_BOUND, rel=1e-10)
    G1, G2 = c.source.gram(), c.target_fit.gram
    at_bound = analytic_mse_gaussian(G1, G2, c.target_fit.gamma_hat, c.target.n,
                                     delta, 0.99 * bound)[0]
    at_zero = analytic_mse_gaussian(G1, G2, c.target_fit.gamma_hat, c.target.n,
                                    delta, 0.0)[0]
    assert at_bound < at_zero


def test_bound_zero_delta_raises():
    c = h.case("GA")
    with pytest.raises(ZeroDeltaError):
        lambda_bound_gaussian(c.target_fit, c.source, np.zeros(c.target.p), 1.0, c.target.n)
    with pytest.raises(ZeroDeltaError):
        lambda_bound_glm("bernoulli", h.case("BB").target, h.case("BB").source,
                         h.case("BB").source.beta1_hat)


def test_bound_glm_gaussian_reduction():
    c = h.case("GA")
    general = lambda_bound_glm("gaussian", c.target, c.source, c.target_fit.beta_hat,
                               n2=c.target.n, gamma2=c.target_fit.gamma_hat)
    delta = c.target_fit.beta_hat - c.source.beta1_hat
    special = lambda_bound_gaussian(c.target_fit, c.source, delta,
                                    c.target_fit.gamma_hat, c.target.n)
    assert general == pytest.approx(special, abs=1e-10, rel=1e-10)


def test_bound_glm_matches_reference():
    c = h.case("BB")
    got = lambda_bound_glm("bernoulli", c.target, c.source, c.target_fit.beta_hat,
                           n2=c.target.n, gamma2=c.target_fit.gamma_hat)
    assert got == pytest.approx(O.BB_LAMBDA_BOUND, rel=1e-10)


# --------------------------------------------------------------- exact risk


def test_analytic_mse_at_zero():
    rng = np.random.default_rng(9)
    G1, G2 = fx.spd_matrix(rng, 3), fx.spd_matrix(rng, 3)
    total, var, bias = analytic_mse_gaussian(G1, G2, 1.3, 25, np.array([0.5, -0.2, 0.1]), 0.0)
    assert bias == 0.0
    assert var == pytest.approx(1.3 / 25 * np.trace(np.linalg.inv(G2)), rel=1e-12)
    assert total == pytest.approx(var, rel=1e-14)


def test_analytic_mse_zero_delta_decreasing():
    rng = np.random.default_rng(11)
    G1, G2 = fx.spd_matrix(rng, 4), fx.spd_matrix(rng, 4)
    grid = np.geomspace(1e-6, 1e4, 50)
    vals = [analytic_mse_gaussian(G1, G2, 1.0, 20, np.zeros(4), lam)[0] for lam in grid]
    assert all(b < a + 1e-15 for a, b in zip(vals, vals[1:]))
    biases = [analytic_mse_gaussian(G1, G2, 1.0, 20, np.zeros(4), lam)[2] for lam in grid]
    assert all(b == 0.0 for b in biases)


def test_analytic_mse_parts_sum():
    rng = np.random.default_rng(13)
    G1, G2 = fx.spd_matrix(rng, 3), fx.spd_matrix(rng, 3)
    total, var, bias = analytic_mse_gaussian(G1, G2, 0.8, 15, np.array([0.2, 0.4, -0.6]), 0.9)
    assert total == pytest.approx(var + bias, rel=1e-14)
    assert var > 0 and bias > 0


def test_analytic_mse_matches_monte_carlo():
    # fixed design, fixed source coefficients: simulate the exact dialed
    # estimator and compare its empirical risk with the analytic decomposition
    inst = fx.instance("GA")
    X2 = inst["X2"]
    p, n2 = X2.shape
    sigma2 = 1.0
    beta2 = inst["beta2"]
    delta = np.array([0.4, -0.3, 0.2, 0.1])
    beta1_hat = beta2 + delta
    G2 = X2 @ X2.T / n2
    G1 = fx.spd_matrix(np.random.default_rng(21), p)
    A = np.linalg.solve(X2 @ X2.T, X2)  # y -> beta2_hat
    R = 20000
    rng = np.random.default_rng(123)
    Y = (X2.T @ beta2)[:, None] + np.sqrt(sigma2) * rng.standard_normal((n2, R))
    B2 = (A @ Y).T  # R x p MLE draws
    for lam in (0.0, 0.1, 0.5, 2.0, 10.0):
        S = G2 + lam * G1
        W = np.linalg.solve(S, G2)
        shift = np.linalg.solve(S, lam * G1 @ beta1_hat)
        est = B2 @ W.T + shift
        sq = np.sum((est - beta2) ** 2, axis=1)
        total = analytic_mse_gaussian(G1, G2, sigma2, n2, beta1_hat - beta2, lam)[0]
        se = sq.std(ddof=1) / np.sqrt(R)
        assert abs(sq.mean() - total) <= 3.0 * se
