"""Detector registry: discovery by name, hyperparameter schemas, validation.

Built-in detectors are registered once at import time into :data:`REGISTRY`;
there is no plugin loading. Separate :class:`Registry` instances can be
created for tests or for extensions.
"""

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .detectors.histogram import HBOSDetector
from .detectors.neighbors import DNNDetector, KNNDetector, LOFDetector
from .exceptions import ConstraintViolation, DuplicateName, UnknownDetector, UnknownParameter

UNSUPERVISED = "unsupervised"
SUPERVISION_KINDS = (UNSUPERVISED,)

_REQUIRED = object()


@dataclass(frozen=True)
class HyperParameter:
    """Schema entry for one hyperparameter.

    ``type`` is ``"int"``, ``"float"`` or ``"choice"``. Numeric constraints are
    a lower bound (inclusive unless ``exclusive``); choice constraints list the
    allowed tokens, with optional aliases mapping to canonical tokens.
    """

    name: str
    type: str
    default: object = _REQUIRED
    minimum: float | None = None
    exclusive: bool = False
    choices: tuple = ()
    aliases: tuple = ()

    @property
    def required(self):
        return self.default is _REQUIRED

    @property
    def constraint(self):
        if self.type == "choice":
            return f"{self.name} in {{{', '.join(self.choices)}}}"
        op = ">" if self.exclusive else ">="
        bound = format(self.minimum, "g") if self.type == "float" else int(self.minimum)
        return f"{self.name} {op} {bound}"

    def validate(self, value):
        """Return the canonical value or raise :class:`ConstraintViolation`."""
        if self.type == "choice":
            value = dict(self.aliases).get(value, value)
            if value not in self.choices:
                raise ConstraintViolation(self.name, self.constraint, value)
            return value
        if isinstance(value, (bool, np.bool_)):
            raise ConstraintViolation(self.name, self.constraint + f" ({self.type})", value)
        if self.type == "int":
            if not isinstance(value, (int, np.integer)):
                raise ConstraintViolation(self.name, self.constraint + " (integer)", value)
            value = int(value)
        else:
            if not isinstance(value, (int, float, np.integer, np.floating)) or not np.isfinite(value):
                raise ConstraintViolation(self.name, self.constraint + " (finite real)", value)
            value = float(value)
        too_small = value <= self.minimum if self.exclusive else value < self.minimum
        if too_small:
            raise ConstraintViolation(self.name, self.constraint, value)
        return value

    def to_dict(self):
        return {
            "name": self.name,
            "type": self.type,
            "constraint": self.constraint,
            "required": self.required,
            "default": None if self.required else self.default,
        }


@dataclass(frozen=True)
class DetectorMetadata:
    name: str
    hyperparameters: tuple
    package_tag: str
    supervision: str = UNSUPERVISED
    description: str = ""

    def parameter(self, name):
        for hp in self.hyperparameters:
            if hp.name == name:
                return hp
        raise UnknownParameter(name, self.name)

    def to_dict(self):
        return {
            "name": self.name,
            "supervision": self.supervision,
            "package_tag": self.package_tag,
            "hyperparameters": [hp.to_dict() for hp in self.hyperparameters],
        }


@dataclass(frozen=True)
class DetectorSpec:
    """A detector name with complete, validated hyperparameters."""

    name: str
    params: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    def as_dict(self):
        return {"detector": self.name, **self.params}


class Registry:
    def __init__(self):
        self._entries = {}

    def register(self, meta, constructor):
        """Make ``constructor(**params)`` resolvable under ``meta.name``."""
        if meta.name in self._entries:
            raise DuplicateName(meta.name)
        if meta.name != meta.name.lower() or not meta.name:
            raise ValueError(f"detector names must be lowercase, got {meta.name!r}")
        self._entries[meta.name] = (meta, constructor)

    def resolve(self, name):
        try:
            return self._entries[name]
        except KeyError:
            raise UnknownDetector(name) from None

    def metadata(self, name):
        return self.resolve(name)[0]

    def list_detectors(self, supervision=None):
        metas = [meta for meta, _ in self._entries.values()]
        if supervision is not None:
            metas = [m for m in metas if m.supervision == supervision]
        return sorted(metas, key=lambda m: m.name)

    def validate_spec(self, name, hyperparameters=None):
        meta = self.metadata(name)
        given = dict(hyperparameters or {})
        for key in given:
            meta.parameter(key)
        params = {}
        for hp in meta.hyperparameters:
            if hp.name in given:
                params[hp.name] = hp.validate(given[hp.name])
            elif hp.required:
                raise ConstraintViolation(hp.name, hp.constraint + " (required)", None)
            else:
                params[hp.name] = hp.default
        return DetectorSpec(name, MappingProxyType(params))

    def build(self, spec):
        """Unfitted estimator for a validated spec."""
        _, constructor = self.resolve(spec.name)
        return constructor(**spec.params)

    def __contains__(self, name):
        return name in self._entries

    def __len__(self):
        return len(self._entries)


BUILTIN_DETECTORS = (
    (
        DetectorMetadata(
            "knn",
            (
                HyperParameter("k", "int", default=5, minimum=1),
                HyperParameter("reduction", "choice", default="mean",
                               choices=("maximum", "mean", "median"),
                               aliases=(("max", "maximum"),)),
            ),
            package_tag="neighbors",
            description="distance to the k nearest neighbors",
        ),
        KNNDetector,
    ),
    (
        DetectorMetadata(
            "lof",
            (HyperParameter("k", "int", default=5, minimum=1),),
            package_tag="neighbors",
            description="local outlier factor",
        ),
        LOFDetector,
    ),
    (
        DetectorMetadata(
            "dnn",
            (HyperParameter("radius", "float", minimum=0.0, exclusive=True),),
            package_tag="neighbors",
            description="inverse neighbor count within a radius",
        ),
        DNNDetector,
    ),
    (
        DetectorMetadata(
            "hbos",
            (HyperParameter("bins", "int", default=10, minimum=1),),
            package_tag="histogram",
            description="histogram-based outlier score",
        ),
        HBOSDetector,
    ),
)


def default_registry():
    registry = Registry()
    for meta, constructor in BUILTIN_DETECTORS:
        registry.register(meta, constructor)
    return registry


REGISTRY = default_registry()


def register(meta, constructor):
    REGISTRY.register(meta, constructor)


def resolve(name):
    return REGISTRY.resolve(name)


def list_detectors(supervision=None):
    return REGISTRY.list_detectors(supervision)


def validate_spec(name, hyperparameters=None):
    return REGISTRY.validate_spec(name, hyperparameters)
