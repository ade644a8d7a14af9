"""Exponential-family building blocks for canonical-link GLMs.

Two families are supported: Gaussian with identity link and Bernoulli with
logit link.  Each family exposes the cumulant b(theta), the mean function
h(theta) = b'(theta), the variance function b''(theta) and the dispersion map
d(gamma) (identity for Gaussian, so d(gamma) = sigma^2; constant 1 for
Bernoulli).
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .errors import ValidationError

# Linear predictors are clamped to this band before exponentiation.  exp(35)
# already exceeds any effect size representable in the supported models, and
# the clamp keeps expit strictly inside (0, 1) in double precision.
ETA_CLAMP = 35.0


class GlmFamily:
    """Family descriptor; use the module-level GAUSSIAN / BERNOULLI instances."""

    name = None

    def cumulant(self, theta):
        raise NotImplementedError

    def mean(self, theta):
        """Canonical inverse link h(theta) = b'(theta)."""
        raise NotImplementedError

    def variance(self, theta):
        """b''(theta), strictly positive for all finite theta."""
        raise NotImplementedError

    def dispersion(self, gamma):
        """d(gamma)."""
        raise NotImplementedError

    def check_response(self, y):
        """Raise ValidationError if y is outside the family's domain."""
        raise NotImplementedError

    def loglik_kernel(self, theta, y):
        """sum_i { y_i theta_i - b(theta_i) } (the gamma-free part)."""
        theta = np.asarray(theta, dtype=float)
        return float(y @ theta - np.sum(self.cumulant(theta)))

    def __repr__(self):
        return f"<GlmFamily {self.name}>"


class GaussianFamily(GlmFamily):
    name = "gaussian"

    def cumulant(self, theta):
        theta = np.asarray(theta, dtype=float)
        return 0.5 * theta * theta

    def mean(self, theta):
        return np.asarray(theta, dtype=float)

    def variance(self, theta):
        return np.ones_like(np.asarray(theta, dtype=float))

    def dispersion(self, gamma):
        return float(gamma)

    def check_response(self, y):
        if not np.all(np.isfinite(y)):
            raise ValidationError("gaussian responses must be finite")


class BernoulliFamily(GlmFamily):
    name = "bernoulli"

    @staticmethod
    def _clamp(theta):
        return np.clip(np.asarray(theta, dtype=float), -ETA_CLAMP, ETA_CLAMP)

    def cumulant(self, theta):
        # log(1 + e^theta), computed without overflow
        return np.logaddexp(0.0, self._clamp(theta))

    def mean(self, theta):
        return expit(self._clamp(theta))

    def variance(self, theta):
        mu = self.mean(theta)
        return mu * (1.0 - mu)

    def dispersion(self, gamma):
        return 1.0

    def check_response(self, y):
        y = np.asarray(y)
        if not np.all((y == 0) | (y == 1)):
            raise ValidationError("bernoulli responses must be 0 or 1")


GAUSSIAN = GaussianFamily()
BERNOULLI = BernoulliFamily()

_FAMILIES = {"gaussian": GAUSSIAN, "bernoulli": BERNOULLI}


def get_family(name):
    """Look a family up by name ('gaussian' or 'bernoulli')."""
    if isinstance(name, GlmFamily):
        return name
    try:
        return _FAMILIES[str(name).lower()]
    except KeyError:
        raise ValidationError(
            f"unknown family {name!r}; expected one of {sorted(_FAMILIES)}"
        ) from None


def link_inverse(family, eta):
    """Apply the canonical inverse link elementwise."""
    return get_family(family).mean(eta)
