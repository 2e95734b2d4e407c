"""Shared data model and the detector entry points ``fit`` and ``score``.

Conventions that every other module relies on:

* Outliers are the positive class. Labels serialize as ``"normal"`` and
  ``"outlier"``; numeric ground truth maps 0 to normal and 1 to outlier.
* Raw scores are finite and higher means more outlying.
* Training scores are computed with self-exclusion for neighbor detectors,
  so a row is never its own neighbor.
"""

from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType

import numpy as np

from .exceptions import (
    DimensionMismatch,
    DuplicateFeatureName,
    EmptyData,
    InvalidLabel,
    LabelLengthMismatch,
)
from .registry import REGISTRY, DetectorSpec
from .validation import check_features, check_n_features, freeze


class Label(str, Enum):
    NORMAL = "normal"
    OUTLIER = "outlier"

    def __str__(self):
        return self.value


_LABEL_TOKENS = {"normal": Label.NORMAL, "outlier": Label.OUTLIER}


def to_label(value):
    if isinstance(value, Label):
        return value
    if isinstance(value, str):
        try:
            return _LABEL_TOKENS[value]
        except KeyError:
            raise InvalidLabel(f"label must be 'normal' or 'outlier', got {value!r}") from None
    if isinstance(value, (bool, np.bool_, int, np.integer, float, np.floating)):
        if value == 0:
            return Label.NORMAL
        if value == 1:
            return Label.OUTLIER
    raise InvalidLabel(f"numeric labels must be 0 (normal) or 1 (outlier), got {value!r}")


def as_labels(values):
    """Tuple of :class:`Label` from labels, label strings, or 0/1 values."""
    return tuple(to_label(v) for v in values)


def outlier_mask(labels):
    """Boolean array, True where the label is ``outlier``."""
    return np.fromiter((to_label(v) is Label.OUTLIER for v in labels), dtype=bool,
                       count=len(labels))


@dataclass(frozen=True, eq=False)
class Dataset:
    """Dense row-major feature matrix with optional labels and column names.

    Build instances with :func:`validate_dataset`, which enforces the
    invariants (finite values, matching lengths, unique names).
    """

    features: np.ndarray
    labels: tuple | None = None
    feature_names: tuple | None = None

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    @property
    def outlier_mask(self):
        return None if self.labels is None else outlier_mask(self.labels)

    def take(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        labels = None if self.labels is None else tuple(self.labels[i] for i in rows)
        return validate_dataset(self.features[rows], labels, self.feature_names,
                                allow_empty=True)

    def __len__(self):
        return self.n_samples

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.features.shape == other.features.shape
            and np.array_equal(self.features, other.features)
            and self.labels == other.labels
            and self.feature_names == other.feature_names
        )

    __hash__ = None

    def __repr__(self):
        return (f"Dataset(n={self.n_samples}, d={self.n_features}, "
                f"labels={'yes' if self.labels is not None else 'no'})")


def validate_dataset(features, labels=None, names=None, *, allow_empty=False):
    """Validating constructor for :class:`Dataset`.

    ``allow_empty`` admits zero rows, which only makes sense for test sets.

    Raises
    ------
    EmptyData, NonFiniteValue, LabelLengthMismatch, DuplicateFeatureName
    """
    X = freeze(check_features(features, allow_empty=allow_empty, copy=True))
    n, d = X.shape
    if labels is not None:
        labels = as_labels(labels)
        if len(labels) != n:
            raise LabelLengthMismatch(n, len(labels))
    if names is not None:
        names = tuple(str(name) for name in names)
        if len(names) != d:
            raise DimensionMismatch(d, len(names))
        seen = set()
        for name in names:
            if not name:
                raise EmptyData("feature names must be non-empty strings")
            if name in seen:
                raise DuplicateFeatureName(name)
            seen.add(name)
    return Dataset(X, labels, names)


@dataclass(frozen=True)
class FitResult:
    """A fitted detector plus the raw scores of its training rows."""

    model: object
    train_scores: np.ndarray
    detector_name: str
    hyperparameters: Mapping

    @property
    def n_features(self):
        return self.model.n_features_in_


def _features(data, allow_empty=False):
    if isinstance(data, Dataset):
        return data.features
    return check_features(data, allow_empty=allow_empty)


def fit(detector_spec, train, registry=None):
    """Fit a registered detector and keep its raw training scores.

    ``detector_spec`` is a detector name, a ``(name, params)`` pair, or a
    :class:`~outlierkit.registry.DetectorSpec`. The hyperparameters are
    validated against the registry schema and defaults are filled in.
    """
    registry = REGISTRY if registry is None else registry
    if isinstance(detector_spec, DetectorSpec):
        spec = registry.validate_spec(detector_spec.name, detector_spec.params)
    elif isinstance(detector_spec, str):
        spec = registry.validate_spec(detector_spec, {})
    else:
        name, params = detector_spec
        spec = registry.validate_spec(name, params)
    model = registry.build(spec).fit(_features(train))
    return FitResult(
        model=model,
        train_scores=model.train_scores_,
        detector_name=spec.name,
        hyperparameters=MappingProxyType(dict(spec.params)),
    )


def score(fitted, test):
    """Raw scores of ``test`` rows against the fitted training set."""
    X = _features(test, allow_empty=True)
    check_n_features(X, fitted.n_features)
    return fitted.model.decision_function(X)
