"""Evaluation metrics for labelled benchmark runs. Outliers are the positive class."""

import numpy as np
from scipy.stats import rankdata

from .core import Label, as_labels, outlier_mask
from .exceptions import LengthMismatch, NTooLarge, SingleClass
from .validation import check_scores


def _scores_and_mask(scores, labels):
    scores = check_scores(scores)
    mask = outlier_mask(labels)
    if scores.shape[0] != mask.shape[0]:
        raise LengthMismatch(scores.shape[0], mask.shape[0])
    return scores, mask


def roc_auc(scores, labels):
    """Area under the ROC curve via the Mann-Whitney U statistic.

    Tied scores get midranks, so a tie between an outlier and a normal
    instance counts one half.
    """
    scores, mask = _scores_and_mask(scores, labels)
    n_pos = int(mask.sum())
    n_neg = mask.size - n_pos
    if n_pos == 0:
        raise SingleClass(Label.OUTLIER.value)
    if n_neg == 0:
        raise SingleClass(Label.NORMAL.value)
    ranks = rankdata(scores, method="average")
    u = ranks[mask].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def top_n(scores, n):
    """Indices of the ``n`` highest scores; ties go to the lower index."""
    scores = check_scores(scores)
    order = np.lexsort((np.arange(scores.size), -scores))
    return order[:n]


def precision_at_n(scores, labels, n):
    """Share of true outliers among the ``n`` highest-scoring instances."""
    scores, mask = _scores_and_mask(scores, labels)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if n > scores.size:
        raise NTooLarge(n, scores.size)
    if not mask.any():
        raise SingleClass(Label.OUTLIER.value)
    return float(mask[top_n(scores, n)].sum() / n)


def confusion_counts(predicted, truth):
    """``(tp, fp, tn, fn)`` with outlier as the positive class."""
    predicted = as_labels(predicted)
    truth = as_labels(truth)
    if len(predicted) != len(truth):
        raise LengthMismatch(len(predicted), len(truth))
    p = outlier_mask(predicted)
    t = outlier_mask(truth)
    tp = int((p & t).sum())
    fp = int((p & ~t).sum())
    tn = int((~p & ~t).sum())
    fn = int((~p & t).sum())
    return tp, fp, tn, fn
