"""Gram matrices, weighted information, and maximum-likelihood fitting."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import _fixtures as fx
import _helpers as h
import _oracles as O
from infoshrink.data import Dataset
from infoshrink.errors import RankDeficientError, ValidationError
from infoshrink.families import BERNOULLI, GAUSSIAN
from infoshrink.glm import fit_mle, gram_matrix, summarize_source, weighted_info

# ---------------------------------------------------------------- gram_matrix


def test_gram_identity_design():
    p = 4
    data = Dataset(np.eye(p), np.zeros(p))
    np.testing.assert_array_equal(gram_matrix(data), np.eye(p) / p)


def test_gram_repeated_column_outer_product():
    # duplicating the column (1,2) leaves G = n^{-1} X X^T equal to the
    # single-column outer product [[1,2],[2,4]]
    data = Dataset(np.array([[1.0, 1.0], [2.0, 2.0]]), np.zeros(2))
    np.testing.assert_allclose(gram_matrix(data), np.array([[1.0, 2.0], [2.0, 4.0]]),
                               rtol=0.0, atol=0.0)


def test_gram_matches_outer_product_loop():
    X = fx.design_5x50()
    data = Dataset(X, np.zeros(50))
    np.testing.assert_allclose(gram_matrix(data), O.GRAM_5X50, rtol=0.0, atol=1e-12)


def test_rank_deficiency_is_a_structured_error():
    # a rank-1 gram is representable; the full-rank gate rejects the design
    data = Dataset(np.array([[1.0, 1.0], [2.0, 2.0]]), np.array([1.0, 2.0]))
    with pytest.raises(RankDeficientError):
        data.check_full_rank()


@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_gram_is_symmetric_psd(seed):
    rng = np.random.default_rng(seed)
    p, n = 3, 17
    data = Dataset(rng.standard_normal((p, n)), np.zeros(n))
    G = gram_matrix(data)
    np.testing.assert_allclose(G, G.T, rtol=0.0, atol=1e-14)
    assert np.all(np.linalg.eigvalsh(G) > -1e-12)


# -------------------------------------------------------------- weighted_info


def test_weighted_info_gaussian_equals_gram():
    c = h.case("GA")
    np.testing.assert_allclose(
        weighted_info(GAUSSIAN, c.target, np.array([5.0, -1.0, 2.0, 0.0])),
        gram_matrix(c.target),
        rtol=0.0,
        atol=1e-14,
    )


def test_weighted_info_bernoulli_at_zero_identity_design():
    p = 5
    data = Dataset(np.eye(p), np.zeros(p))
    np.testing.assert_allclose(
        weighted_info(BERNOULLI, data, np.zeros(p)),
        np.eye(p) / (4 * p),
        rtol=0.0,
        atol=1e-15,
    )


def test_weighted_info_matches_fd_jacobian():
    X, y, beta = fx.bern_toy38()
    data = Dataset(X, y)
    np.testing.assert_allclose(weighted_info(BERNOULLI, data, beta), O.WINFO_TOY_FD,
                               rtol=1e-6, atol=1e-9)


@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_weighted_info_psd(seed):
    rng = np.random.default_rng(seed)
    p, n = 3, 25
    data = Dataset(rng.standard_normal((p, n)), np.zeros(n))
    beta = rng.normal(size=p)
    V = weighted_info(BERNOULLI, data, beta)
    np.testing.assert_allclose(V, V.T, rtol=0.0, atol=1e-14)
    assert np.all(np.linalg.eigvalsh(V) > -1e-12)


# ------------------------------------------------------------------- fit_mle


def test_gaussian_perfect_fit():
    rng = np.random.default_rng(5)
    X = np.vstack([np.ones(20), rng.standard_normal((2, 20))])
    beta0 = np.array([0.5, -1.0, 2.0])
    fit = fit_mle("gaussian", Dataset(X, X.T @ beta0))
    np.testing.assert_allclose(fit.beta_hat, beta0, rtol=0.0, atol=1e-10)
    assert fit.gamma_hat == pytest.approx(0.0, abs=1e-18)


def test_gaussian_fit_matches_normal_equations():
    for name, beta_ref, sigma_ref in [
        ("GA", O.GA_TARGET_BETA, O.GA_TARGET_SIGMA2),
    ]:
        c = h.case(name)
        np.testing.assert_allclose(c.target_fit.beta_hat, beta_ref, rtol=0.0, atol=1e-10)
        assert c.target_fit.gamma_hat == pytest.approx(sigma_ref, rel=1e-10)
        np.testing.assert_allclose(c.source_fit.beta_hat, O.GA_SOURCE_BETA,
                                   rtol=0.0, atol=1e-10)
        assert c.source_fit.gamma_hat == pytest.approx(O.GA_SOURCE_SIGMA2, rel=1e-10)


def test_bernoulli_fits_match_reference():
    for name, src_ref, tgt_ref in [
        ("BA", O.BA_SOURCE_BETA, O.BA_TARGET_BETA),
        ("BB", O.BB_SOURCE_BETA, O.BB_TARGET_BETA),
        ("BC", O.BC_SOURCE_BETA, O.BC_TARGET_BETA),
    ]:
        c = h.case(name)
        np.testing.assert_allclose(c.source_fit.beta_hat, src_ref, rtol=0.0, atol=1e-7)
        np.testing.assert_allclose(c.target_fit.beta_hat, tgt_ref, rtol=0.0, atol=1e-7)
        assert c.target_fit.gamma_hat == 1.0


def test_bernoulli_score_vanishes_at_mle():
    for name in h.BERNOULLI_CASES:
        c = h.case(name)
        X, y = c.target.design, c.target.response
        score = X @ (y - BERNOULLI.mean(X.T @ c.target_fit.beta_hat)) / c.target.n
        assert np.abs(score).max() < 1e-8


def test_fit_metadata():
    c = h.case("BA")
    fit = c.target_fit
    assert fit.converged
    assert fit.n == c.target.n and fit.p == c.target.p
    np.testing.assert_allclose(fit.gram, gram_matrix(c.target), rtol=0.0, atol=1e-14)
    np.testing.assert_allclose(
        fit.info, weighted_info(BERNOULLI, c.target, fit.beta_hat), rtol=0.0, atol=1e-14
    )


# ----------------------------------------------------------- summarize_source


def test_summarize_source_row_level_payload():
    c = h.case("BA")
    assert c.source.n1 == c.source_data.n
    assert c.source.has_design
    np.testing.assert_array_equal(c.source.beta1_hat, c.source_fit.beta_hat)
    np.testing.assert_allclose(c.source.gram(), gram_matrix(c.source_data),
                               rtol=0.0, atol=1e-14)


def test_summarize_source_gram_only_round_trip():
    c = h.case("GA")
    summary = h.gram_summary("GA")
    assert not summary.has_design
    np.testing.assert_allclose(summary.gram(), gram_matrix(c.source_data),
                               rtol=0.0, atol=1e-14)
    assert summary.payload.sigma_sq == pytest.approx(O.GA_SOURCE_SIGMA2, rel=1e-10)
    with pytest.raises(ValidationError):
        summarize_source("bernoulli", h.case("BA").source_data, gram_only=True)
