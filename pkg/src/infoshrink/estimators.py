"""Scikit-learn style wrappers around the dialed estimator.

These adapt the functional core to the fit/predict idiom: rows are samples,
the source is a constructor parameter, and lam="auto" selects the dial by
minimizing the plug-in risk curve.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .data import Dataset, SourceSummary
from .dial import DEFAULT_BRACKET, select_lambda_gaussian, select_lambda_glm
from .errors import ValidationError
from .families import BERNOULLI, GAUSSIAN
from .glm import fit_mle
from .shrink import solve_dial_estimate


class _ShrinkageBase(BaseEstimator):
    _family = None

    def __init__(self, source=None, lam="auto", lambda_bracket=DEFAULT_BRACKET,
                 fit_intercept=True):
        self.source = source
        self.lam = lam
        self.lambda_bracket = lambda_bracket
        self.fit_intercept = fit_intercept

    def _dataset(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        design = X.T
        if self.fit_intercept:
            design = np.vstack([np.ones(X.shape[0]), design])
        return Dataset(design, np.asarray(y, dtype=float)), X.shape[1]

    def fit(self, X, y):
        if not isinstance(self.source, SourceSummary):
            raise ValidationError(
                "source must be a SourceSummary (see glm.summarize_source)"
            )
        data, n_features = self._dataset(X, y)
        family = self._family
        target_fit = fit_mle(family, data)
        if isinstance(self.lam, str):
            if self.lam != "auto":
                raise ValidationError(f"lam must be a number or 'auto', got {self.lam!r}")
            if family is GAUSSIAN:
                lam, curve = select_lambda_gaussian(target_fit, self.source,
                                                    self.lambda_bracket)
            else:
                lam, curve = select_lambda_glm(family, data, target_fit, self.source,
                                               self.lambda_bracket)
        else:
            lam, curve = float(self.lam), None
        estimate = solve_dial_estimate(family, data, self.source, lam,
                                       target_fit=target_fit)
        self.n_features_in_ = n_features
        self.lambda_ = lam
        self.curve_ = curve
        self.estimate_ = estimate
        self.target_fit_ = target_fit
        if self.fit_intercept:
            self.intercept_ = float(estimate.beta_tilde[0])
            self.coef_ = estimate.beta_tilde[1:].copy()
        else:
            self.intercept_ = 0.0
            self.coef_ = estimate.beta_tilde.copy()
        return self

    def _linear_predictor(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValidationError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return X @ self.coef_ + self.intercept_


class ShrinkageRegressor(RegressorMixin, _ShrinkageBase):
    """Linear regression on target data with dial-controlled source borrowing."""

    _family = GAUSSIAN

    def predict(self, X):
        return self._linear_predictor(X)


class ShrinkageClassifier(ClassifierMixin, _ShrinkageBase):
    """Logistic regression on target data with dial-controlled source borrowing."""

    _family = BERNOULLI

    def fit(self, X, y):
        y = np.asarray(y, dtype=float)
        super().fit(X, y)
        self.classes_ = np.array([0.0, 1.0])
        return self

    def predict_proba(self, X):
        prob1 = BERNOULLI.mean(self._linear_predictor(X))
        return np.column_stack([1.0 - prob1, prob1])

    def predict(self, X):
        return (self._linear_predictor(X) >= 0.0).astype(float)
