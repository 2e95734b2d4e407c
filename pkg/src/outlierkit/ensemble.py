"""Ensembles over normalized score matrices, and the probability/label wrappers.

Each member is fitted on the full training set and calibrated on its own
training scores. Member scores are normalized column by column and then
combined row-wise. Labels come from thresholding the combined scores
against the combined training scores. A single-member ensemble is the
plain "detector + conversion" wrapper.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, clone

from .core import FitResult, validate_dataset
from .exceptions import EmptyMatrix, MemberError, OutlierKitError, UnnormalizedInput
from .registry import REGISTRY, DetectorSpec
from .transform import KINDS, apply_calibration, calibrate, check_fraction, classify
from .validation import check_features, check_is_fitted, check_n_features

RULES = ("mean", "maximum", "median")

_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ScoreMatrix:
    """Instances x detectors matrix of scores, one named column per member."""

    values: np.ndarray
    column_names: tuple = ()

    @property
    def shape(self):
        return self.values.shape


def _exact_mean(row):
    # correctly rounded mean of the exact sum, so m identical members return
    # the member value unchanged and raising any entry never lowers the mean
    total = sum(map(Fraction, row), Fraction(0))
    return total.numerator / (total.denominator * len(row))


def combine(matrix, rule="mean"):
    """Reduce each row of a normalized score matrix to one score.

    ``mean`` is the correctly rounded arithmetic mean, ``maximum`` the row
    maximum, and ``median`` the middle value (for an even count, the mean of
    the two middle values).
    """
    values = np.asarray(getattr(matrix, "values", matrix), dtype=np.float64)
    if values.ndim != 2 or values.shape[1] == 0:
        raise EmptyMatrix("score matrix needs at least one column")
    if rule not in RULES:
        raise ValueError(f"combination rule must be one of {RULES}, got {rule!r}")
    if not np.isfinite(values).all():
        raise UnnormalizedInput("score matrix contains non-finite values")
    if values.size and (values.min() < -_TOLERANCE or values.max() > 1 + _TOLERANCE):
        raise UnnormalizedInput("combination expects scores normalized to [0, 1]")
    values = np.clip(values, 0.0, 1.0)
    n, m = values.shape
    if rule == "maximum":
        return values.max(axis=1)
    if rule == "median":
        ordered = np.sort(values, axis=1)
        if m % 2:
            return ordered[:, m // 2].copy()
        return (ordered[:, m // 2 - 1] + ordered[:, m // 2]) / 2.0
    out = values[:, 0].copy()
    mixed = np.flatnonzero((values != values[:, :1]).any(axis=1))
    for i in mixed:
        out[i] = _exact_mean(values[i].tolist())
    return out


@dataclass(frozen=True)
class EnsembleConfig:
    """Declarative pipeline: detectors, normalization, combination, threshold."""

    members: tuple
    normalization: str = "minmax"
    combination: str = "mean"
    outlier_fraction: float = 0.1
    member_names: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise EmptyMatrix("an ensemble needs at least one member")
        if self.normalization not in KINDS:
            raise ValueError(f"normalization must be one of {KINDS}, got {self.normalization!r}")
        if self.combination not in RULES:
            raise ValueError(f"combination must be one of {RULES}, got {self.combination!r}")
        object.__setattr__(self, "outlier_fraction", check_fraction(self.outlier_fraction))


class OutlierEnsemble(BaseEstimator):
    """Combine several detectors into calibrated probabilities and labels.

    Parameters
    ----------
    members : list of detector estimators
        Unfitted detectors; each is cloned and fitted on the full data.
    normalization : {"minmax", "unify"}, default="minmax"
    combination : {"mean", "maximum", "median"}, default="mean"
    outlier_fraction : float, default=0.1
        Expected share of outliers, used to place the label threshold.
    member_names : list of str, optional
        Detector identifiers for the score-matrix columns.
    n_jobs : int, optional
        Members fitted and scored concurrently; results are assembled by
        member position, so the output does not depend on it.

    Attributes
    ----------
    members_ : tuple of FitResult
    calibrations_ : tuple of Calibration
    train_scores_ : ndarray
        Combined training scores; the label threshold is taken from these.
    """

    def __init__(self, members, normalization="minmax", combination="mean",
                 outlier_fraction=0.1, member_names=None, n_jobs=None):
        self.members = members
        self.normalization = normalization
        self.combination = combination
        self.outlier_fraction = outlier_fraction
        self.member_names = member_names
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        X = check_features(getattr(X, "features", X))
        EnsembleConfig(self.members, self.normalization, self.combination,
                       self.outlier_fraction)
        names = self._names()

        def fit_one(position):
            est = clone(self.members[position])
            try:
                est.fit(X)
            except OutlierKitError as exc:
                raise MemberError(position, exc) from exc
            hyper = {k: v for k, v in est.get_params(deep=False).items()
                     if k not in ("algorithm", "n_jobs")}
            return FitResult(est, est.train_scores_, names[position], hyper)

        self.members_ = tuple(self._map(fit_one, range(len(self.members))))
        self.calibrations_ = tuple(calibrate(r.train_scores, self.normalization)
                                   for r in self.members_)
        normalized = np.column_stack([
            apply_calibration(cal, r.train_scores)
            for cal, r in zip(self.calibrations_, self.members_)
        ])
        self.train_scores_ = combine(normalized, self.combination)
        self.n_features_in_ = X.shape[1]
        return self

    def raw_scores(self, X):
        """Raw member scores as a :class:`ScoreMatrix` (unnormalized)."""
        check_is_fitted(self, "members_")
        X = check_features(getattr(X, "features", X), allow_empty=True)
        check_n_features(X, self.n_features_in_)
        cols = self._map(lambda r: r.model.decision_function(X), self.members_)
        values = np.column_stack(cols) if cols else np.empty((X.shape[0], 0))
        return ScoreMatrix(values.reshape(X.shape[0], len(self.members_)), self._names())

    def normalized_scores(self, X):
        raw = self.raw_scores(X).values
        cols = [apply_calibration(cal, raw[:, j]) for j, cal in enumerate(self.calibrations_)]
        return ScoreMatrix(np.column_stack(cols).reshape(raw.shape), self._names())

    def predict_proba(self, X):
        """Combined normalized score of each row, in [0, 1]."""
        return combine(self.normalized_scores(X), self.combination)

    def decision_function(self, X):
        return self.predict_proba(X)

    def predict(self, X):
        """``Label.OUTLIER`` / ``Label.NORMAL`` per row."""
        return classify(self.train_scores_, self.predict_proba(X), self.outlier_fraction)

    def _names(self):
        if self.member_names:
            return tuple(self.member_names)
        return tuple(type(m).__name__ for m in self.members)

    def _map(self, fn, items):
        items = list(items)
        if not self.n_jobs or self.n_jobs == 1 or len(items) < 2:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=int(self.n_jobs)) as pool:
            return list(pool.map(fn, items))


def wrap(detector, normalization="minmax", outlier_fraction=0.1):
    """Single-detector wrapper whose ``predict_proba``/``predict`` convert scores."""
    return OutlierEnsemble([detector], normalization=normalization,
                           outlier_fraction=outlier_fraction)


# -- functional API ---------------------------------------------------------


def _member_spec(member, registry):
    if isinstance(member, DetectorSpec):
        return registry.validate_spec(member.name, member.params)
    if isinstance(member, str):
        return registry.validate_spec(member, {})
    name, params = member
    return registry.validate_spec(name, params)


def build_ensemble(config, registry=None):
    """Unfitted :class:`OutlierEnsemble` for a config, members resolved by name."""
    registry = REGISTRY if registry is None else registry
    estimators, names = [], []
    for position, member in enumerate(config.members):
        try:
            spec = _member_spec(member, registry)
        except OutlierKitError as exc:
            raise MemberError(position, exc) from exc
        estimators.append(registry.build(spec))
        names.append(spec.name)
    return OutlierEnsemble(estimators, config.normalization, config.combination,
                           config.outlier_fraction, member_names=names)


def fit_ensemble(config, train, registry=None):
    return build_ensemble(config, registry).fit(train)


def predict_proba(fitted, test):
    return fitted.predict_proba(_test_features(test))


def predict_labels(fitted, test):
    return fitted.predict(_test_features(test))


def _test_features(test):
    if hasattr(test, "features"):
        return test.features
    return validate_dataset(test, allow_empty=True).features

