"""scikit-learn compatible wrappers around the power and polarization fits.

Both take a single feature (pump power, or pump polarization angle in degrees)
and accept optional per-sample 1-sigma errors through ``fit(..., y_err=...)``.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_abscissa, check_fit_data
from .metrics import fit_linear, fit_polarization


class PowerLinearityRegressor(RegressorMixin, BaseEstimator):
    """Weighted straight-line fit of a count rate against pump power.

    ``slope_`` is the power-normalized rate (e.g. Hz/mW when X is in mW).
    """

    def __init__(self, use_errors=True):
        self.use_errors = use_errors

    def fit(self, X, y, y_err=None):
        points = check_fit_data(X, y, y_err if self.use_errors else None)
        self.fit_ = fit_linear(points)
        self.slope_ = self.fit_.slope
        self.intercept_ = self.fit_.intercept
        self.slope_error_ = self.fit_.slope_error
        self.intercept_error_ = self.fit_.intercept_error
        self.r_squared_ = self.fit_.r_squared
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        return self.fit_.predict(check_abscissa(X))


class PolarizationRegressor(RegressorMixin, BaseEstimator):
    """``offset + amplitude cos^2(theta - theta0)`` fitted to a pump-polarization scan."""

    def __init__(self, use_errors=True):
        self.use_errors = use_errors

    def fit(self, X, y, y_err=None):
        points = check_fit_data(X, y, y_err if self.use_errors else None)
        self.fit_ = fit_polarization(points)
        self.amplitude_ = self.fit_.amplitude
        self.offset_ = self.fit_.offset
        self.theta0_ = self.fit_.theta0
        self.degenerate_ = self.fit_.degenerate
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        return np.asarray(self.fit_.predict(check_abscissa(X)), dtype=float)
