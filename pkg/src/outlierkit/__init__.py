"""Outlier detection with scoring kept separate from score conversion.

Detectors turn points into raw outlier scores. :mod:`outlierkit.transform`
converts scores into normalized values, probabilities or labels, calibrated
on training scores only. :mod:`outlierkit.ensemble` combines several
detectors.

>>> import numpy as np
>>> from outlierkit import KNNDetector, wrap
>>> X = np.array([[0.0], [1.0], [2.0], [50.0]])
>>> model = wrap(KNNDetector(k=1), outlier_fraction=0.25).fit(X)
>>> [str(label) for label in model.predict([[1.5], [40.0]])]
['normal', 'outlier']
"""

__version__ = "0.1.0"

from .core import Dataset, FitResult, Label, fit, score, validate_dataset
from .detectors.histogram import HBOSDetector
from .detectors.neighbors import DNNDetector, KNNDetector, LOFDetector
from .ensemble import (
    EnsembleConfig,
    OutlierEnsemble,
    ScoreMatrix,
    combine,
    fit_ensemble,
    predict_labels,
    predict_proba,
    wrap,
)
from .index import NeighborIndex, build_index
from .registry import REGISTRY, list_detectors, validate_spec
from .transform import ScoreCalibrator, ThresholdClassifier, calibrate, classify, normalize, unify

__all__ = [
    "Dataset",
    "DNNDetector",
    "EnsembleConfig",
    "FitResult",
    "HBOSDetector",
    "KNNDetector",
    "LOFDetector",
    "Label",
    "NeighborIndex",
    "OutlierEnsemble",
    "REGISTRY",
    "ScoreCalibrator",
    "ScoreMatrix",
    "ThresholdClassifier",
    "build_index",
    "calibrate",
    "classify",
    "combine",
    "fit",
    "fit_ensemble",
    "list_detectors",
    "normalize",
    "predict_labels",
    "predict_proba",
    "score",
    "unify",
    "validate_dataset",
    "validate_spec",
    "wrap",
]
