import numpy as np
from sklearn.base import BaseEstimator

from ..validation import check_features, check_is_fitted, check_n_features, freeze


class BaseDetector(BaseEstimator):
    """Common fit/score protocol for unsupervised detectors.

    Subclasses implement ``_fit(X)``, which stores the fitted state and returns
    the raw training scores, and ``_score(X)``, which returns raw scores for
    new rows. Scores follow one convention for every detector: finite, and
    higher means more outlying.

    Detectors only produce raw scores. Turning scores into probabilities or
    labels is left to :mod:`outlierkit.transform` and
    :mod:`outlierkit.ensemble`.

    Attributes
    ----------
    train_scores_ : ndarray of shape (n_samples,)
        Raw scores of the training rows, computed during ``fit``. Score
        conversion is calibrated on these.
    n_features_in_ : int
        Number of features seen during ``fit``.
    """

    def fit(self, X, y=None):
        X = check_features(X)
        scores = self._fit(X)
        self.n_features_in_ = X.shape[1]
        self.train_scores_ = freeze(np.asarray(scores, dtype=np.float64))
        return self

    def decision_function(self, X):
        """Raw outlier scores of ``X``; never mutates the fitted state."""
        check_is_fitted(self, "train_scores_")
        X = check_features(X, allow_empty=True)
        check_n_features(X, self.n_features_in_)
        if X.shape[0] == 0:
            return np.empty(0, dtype=np.float64)
        return np.asarray(self._score(X), dtype=np.float64)

    def fit_decision_function(self, X, y=None):
        return self.fit(X).train_scores_.copy()

    def _fit(self, X):  # pragma: no cover - abstract
        raise NotImplementedError

    def _score(self, X):  # pragma: no cover - abstract
        raise NotImplementedError


def row_mean(values):
    """Mean of each row, summing columns left to right.

    The fixed order makes each row's result independent of how many other
    rows are in the batch.
    """
    acc = values[:, 0].copy()
    for j in range(1, values.shape[1]):
        acc += values[:, j]
    return acc / values.shape[1]
