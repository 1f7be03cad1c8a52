"""scikit-learn style wrappers so scans and sensitivity fits compose with
pipelines, grid searches and ``clone``.

``X`` is always a single column of Dove angles in radians.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .metrology import SLOPE_EPS, ideal_noon_fringe, uncertainty_curve
from .propagation import DetectionPattern, FringeSample, postselect_probability, propagate
from .spdc_source import four_photon_state, two_photon_state

SCHEMES = ("two_photon", "four_photon", "ideal_noon")

DEFAULT_PATTERNS = {"two_photon": "a+:1,b-:1", "four_photon": "a+:3,b-:1"}


def _theta_column(X) -> np.ndarray:
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single column of angles, got {X.shape[1]} columns")
        X = X[:, 0]
    return X


def build_state(scheme: str, l: int, convention: str = "ket"):
    if scheme == "two_photon":
        return two_photon_state(l, allow_degenerate=True)
    if scheme == "four_photon":
        return four_photon_state(l, convention=convention, allow_degenerate=True)
    raise ValueError(f"scheme {scheme!r} has no input state")


def scheme_photons(scheme: str, n_photons: int | None = None) -> int:
    if scheme == "two_photon":
        return 2
    if scheme == "four_photon":
        return 4
    if scheme == "ideal_noon":
        if not n_photons:
            raise ValueError("ideal_noon needs n_photons")
        return int(n_photons)
    raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")


class CoincidenceFringe(TransformerMixin, BaseEstimator):
    """Coincidence probability as a function of Dove angle.

    ``fit`` scans the calibration angles and stores the peak raw probability;
    ``transform`` returns columns ``(raw, normalized)`` using that peak.
    """

    def __init__(self, scheme="two_photon", l=1, n_photons=None, pattern=None, convention="ket"):
        self.scheme = scheme
        self.l = l
        self.n_photons = n_photons
        self.pattern = pattern
        self.convention = convention

    def _raw(self, theta: np.ndarray) -> np.ndarray:
        if self.scheme == "ideal_noon":
            return np.array([s.raw for s in ideal_noon_fringe(self.n_photons_, self.l, theta)])
        out = propagate(self.state_, theta)
        return np.broadcast_to(np.asarray(postselect_probability(out, self.pattern_), dtype=float), theta.shape).copy()

    def fit(self, X, y=None):
        theta = _theta_column(X)
        self.n_photons_ = scheme_photons(self.scheme, self.n_photons)
        if self.scheme != "ideal_noon":
            self.state_ = build_state(self.scheme, self.l, self.convention)
            self.pattern_ = DetectionPattern.parse(self.pattern or DEFAULT_PATTERNS[self.scheme], self.l)
        self.peak_raw_ = float(self._raw(theta).max())
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "peak_raw_")
        theta = _theta_column(X)
        raw = self._raw(theta)
        normalized = raw / self.peak_raw_ if self.peak_raw_ > 0 else np.full_like(raw, np.nan)
        return np.column_stack([raw, normalized])


class AngularSensitivityEstimator(BaseEstimator):
    """Fit a sampled normalized fringe ``y(theta)``; ``predict`` gives Delta-theta."""

    def __init__(self, n_photons=2, l=1, slope_eps=SLOPE_EPS):
        self.n_photons = n_photons
        self.l = l
        self.slope_eps = slope_eps

    def fit(self, X, y):
        theta = _theta_column(X)
        y = check_array(y, ensure_2d=False, dtype=float)
        if y.shape != theta.shape:
            raise ValueError("X and y must have the same number of samples")
        order = np.argsort(theta)
        samples = [FringeSample(float(t), float(v), float(v)) for t, v in zip(theta[order], y[order])]
        self.report_ = uncertainty_curve(samples, self.n_photons, self.l, self.slope_eps)
        self.min_delta_theta_ = self.report_.min_delta_theta
        self.theta_at_min_ = self.report_.theta_at_min
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        """Delta-theta at the fitted angles nearest to ``X`` (NaN where flagged)."""
        check_is_fitted(self, "report_")
        theta = _theta_column(X)
        grid = np.array([s.theta for s in self.report_.samples])
        values = np.array([s.delta_theta for s in self.report_.samples])
        idx = np.clip(np.searchsorted(grid, theta), 1, len(grid) - 1)
        nearer_left = np.abs(theta - grid[idx - 1]) <= np.abs(grid[idx] - theta)
        return values[np.where(nearer_left, idx - 1, idx)]

    def score(self, X=None, y=None):
        """Negative distance of the fitted minimum from the entangled limit."""
        check_is_fitted(self, "report_")
        return -abs(self.min_delta_theta_ - self.report_.heisenberg_limit)
