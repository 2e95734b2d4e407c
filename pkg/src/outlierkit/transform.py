"""Score conversion: raw detector scores to normalized scores, probabilities, labels.

Calibration statistics always come from the training scores. Test scores are
only ever mapped through them.

minmax
    ``clamp((s - min) / (max - min), 0, 1)``. A constant training vector
    maps every score to 0.5.
unify
    ``max(0, erf((s - mean) / (std * sqrt(2))))`` with the population
    standard deviation. Below-mean scores carry no outlier evidence. A zero
    deviation gives 0, 0.5 or 1 for scores below, at or above the mean.

Labels come from a nearest-rank threshold on the training scores. A score
is an outlier only if it lies strictly above
``t = sorted(train)[ceil((1 - f) * n) - 1]``.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import erf
from sklearn.base import BaseEstimator, TransformerMixin

from .core import Label
from .exceptions import EmptyScores, FractionOutOfRange, WrongCalibrationKind
from .validation import check_is_fitted, check_scores

KINDS = ("minmax", "unify")

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Calibration:
    kind: str
    minimum: float | None = None
    maximum: float | None = None
    mean: float | None = None
    std: float | None = None

    @property
    def degenerate(self):
        if self.kind == "minmax":
            return self.maximum == self.minimum
        return self.std == 0.0


def calibrate(train_scores, kind="minmax"):
    scores = check_scores(train_scores)
    if scores.size == 0:
        raise EmptyScores("cannot calibrate on an empty score vector")
    if kind == "minmax":
        return Calibration(kind, minimum=float(scores.min()), maximum=float(scores.max()))
    if kind == "unify":
        if scores.min() == scores.max():
            # np.mean of equal values can be off by an ulp; keep this exact
            return Calibration(kind, mean=float(scores[0]), std=0.0)
        return Calibration(kind, mean=float(scores.mean()), std=float(scores.std(ddof=0)))
    raise ValueError(f"calibration kind must be one of {KINDS}, got {kind!r}")


def normalize(cal, scores):
    """Min-max scale ``scores`` into [0, 1] using training extremes."""
    if cal.kind != "minmax":
        raise WrongCalibrationKind("minmax", cal.kind)
    scores = check_scores(scores)
    if cal.degenerate:
        return np.full(scores.shape, 0.5)
    lo, hi = cal.minimum, cal.maximum
    if not math.isfinite(hi - lo):
        # the span overflows; halving keeps the ratio without the overflow
        with np.errstate(over="ignore"):
            return np.clip((scores / 2 - lo / 2) / (hi / 2 - lo / 2), 0.0, 1.0)
    with np.errstate(over="ignore"):
        return np.clip((scores - lo) / (hi - lo), 0.0, 1.0)


def unify(cal, scores):
    """Gaussian scaling of ``scores`` into [0, 1]."""
    if cal.kind != "unify":
        raise WrongCalibrationKind("unify", cal.kind)
    scores = check_scores(scores)
    if cal.degenerate:
        return np.where(scores > cal.mean, 1.0, np.where(scores == cal.mean, 0.5, 0.0))
    return np.maximum(0.0, erf((scores - cal.mean) / (cal.std * _SQRT2)))


def apply_calibration(cal, scores):
    return normalize(cal, scores) if cal.kind == "minmax" else unify(cal, scores)


def check_fraction(outlier_fraction):
    f = outlier_fraction
    if isinstance(f, bool) or not isinstance(f, (int, float, np.integer, np.floating)):
        raise FractionOutOfRange(f)
    if not 0.0 < f < 1.0:
        raise FractionOutOfRange(f)
    return float(f)


def threshold_rank(n, outlier_fraction):
    """1-based nearest-rank position ``ceil((1 - f) * n)``, at least 1.

    The fraction is taken at its shortest decimal representation, so
    ``f = 0.3`` behaves as exactly 3/10 rather than its binary neighbor.
    """
    f = Fraction(repr(check_fraction(outlier_fraction)))
    return max(1, math.ceil((1 - f) * n))


def threshold(train_scores, outlier_fraction):
    scores = check_scores(train_scores)
    if scores.size == 0:
        raise EmptyScores("cannot derive a threshold from an empty score vector")
    rank = threshold_rank(scores.size, outlier_fraction)
    return float(np.sort(scores, kind="stable")[rank - 1])


def classify(train_scores, test_scores, outlier_fraction):
    """Label test scores against a threshold taken from the training scores."""
    t = threshold(train_scores, outlier_fraction)
    return labels_above(check_scores(test_scores), t)


def labels_above(scores, t):
    return tuple(Label.OUTLIER if s > t else Label.NORMAL for s in scores.tolist())


# -- estimator wrappers -----------------------------------------------------


class ScoreCalibrator(TransformerMixin, BaseEstimator):
    """Fit on training scores, then map any scores into [0, 1].

    Parameters
    ----------
    kind : {"minmax", "unify"}, default="minmax"
    """

    def __init__(self, kind="minmax"):
        self.kind = kind

    def fit(self, scores, y=None):
        self.calibration_ = calibrate(scores, self.kind)
        return self

    def transform(self, scores):
        check_is_fitted(self, "calibration_")
        return apply_calibration(self.calibration_, scores)


class ThresholdClassifier(BaseEstimator):
    """Nearest-rank threshold on training scores; ``predict`` returns labels."""

    def __init__(self, outlier_fraction=0.1):
        self.outlier_fraction = outlier_fraction

    def fit(self, scores, y=None):
        self.threshold_ = threshold(scores, self.outlier_fraction)
        return self

    def predict(self, scores):
        check_is_fitted(self, "threshold_")
        return labels_above(check_scores(scores), self.threshold_)
