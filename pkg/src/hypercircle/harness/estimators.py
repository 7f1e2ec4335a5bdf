"""scikit-learn style wrappers around the scan and the exponent fit."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .scan import DEFAULT_X, OmegaSpec, error_scan, fit_power, nonhyperbolic_fit


class ErrorScan(BaseEstimator):
    """Runs the grid scan on fit; exposes per-X statistics as arrays.

    >>> est = ErrorScan(X_values=(1000, 3000, 10000, 100000)).fit()  # doctest: +SKIP
    >>> est.statistic_                                               # doctest: +SKIP
    """

    def __init__(self, omega=None, X_values=DEFAULT_X, workers=1, cap=None, with_nonhyp=True):
        self.omega = omega
        self.X_values = X_values
        self.workers = workers
        self.cap = cap
        self.with_nonhyp = with_nonhyp

    def fit(self, X=None, y=None):
        Xs = self.X_values if X is None else tuple(np.ravel(X).tolist())
        res = error_scan(self.omega or OmegaSpec(), Xs, workers=self.workers,
                         cap=self.cap, with_nonhyp=self.with_nonhyp)
        self.result_ = res
        self.X_ = np.array([float(v) for v in res.l2])
        self.statistic_ = np.array(list(res.l2.values()))
        if self.with_nonhyp:
            self.nonhyp_ = np.array([res.nonhyp_mean[v] for v in res.l2])
        return self

    def transform(self, X=None):
        """Columns (X, L2 statistic), ready for ExponentFit."""
        check_is_fitted(self, "result_")
        return np.column_stack([self.X_, self.statistic_])

    def nonhyperbolic_exponent(self):
        check_is_fitted(self, "result_")
        return nonhyperbolic_fit(self.result_)


class ExponentFit(RegressorMixin, BaseEstimator):
    """Power law y = exp(b) X^slope fitted on log-log axes."""

    def fit(self, X, y):
        x = np.ravel(np.asarray(X, dtype=float))
        fit = fit_power(x, np.asarray(y, dtype=float))
        self.slope_, self.stderr_, self.intercept_, self.n_points_ = (
            fit.slope, fit.stderr, fit.intercept, fit.n)
        return self

    def predict(self, X):
        check_is_fitted(self, "slope_")
        x = np.ravel(np.asarray(X, dtype=float))
        return np.exp(self.intercept_) * x ** self.slope_

    def score(self, X, y, sample_weight=None):
        # R^2 in log space, which is what the fit minimizes
        check_is_fitted(self, "slope_")
        ly = np.log(np.asarray(y, dtype=float))
        lp = np.log(self.predict(X))
        ss = float(np.sum((ly - ly.mean()) ** 2))
        return 1.0 - float(np.sum((ly - lp) ** 2)) / ss if ss else 1.0
