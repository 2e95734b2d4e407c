"""Pipeline configuration files.

The format is line oriented. ``#`` outside quotes starts a comment and
blank lines are ignored. Top-level ``key = value`` pairs set the conversion options.
Each ``[member]`` header opens a new ensemble member, whose ``detector``
key names a registered detector and whose remaining keys are its
hyperparameters::

    normalization = minmax        # minmax | unify
    combination = mean            # mean | maximum (alias: max) | median
    outlier_fraction = 0.1        # in (0, 1)

    [member]
    detector = knn
    k = 5

Values are bare tokens or strings quoted with ``"`` or ``'``. A bare token
that looks like an integer parses as an int, one that looks like a decimal
or scientific number parses as a float, and anything else is a string.
Quoted values are always strings.
"""

import re

from .ensemble import RULES, EnsembleConfig
from .exceptions import ParseError
from .registry import REGISTRY
from .transform import KINDS

DEFAULTS = {"normalization": "minmax", "combination": "mean", "outlier_fraction": 0.1}
COMBINATION_ALIASES = {"max": "maximum"}

_INT = re.compile(r"[+-]?\d+")
_FLOAT = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?")
_SECTION = re.compile(r"\[\s*([A-Za-z_][\w-]*)\s*\]")
_KEY = re.compile(r"[A-Za-z_]\w*")


def _value(token, line):
    token = token.strip()
    if not token:
        raise ParseError("missing value", line=line)
    if token[0] in "\"'":
        if len(token) < 2 or token[-1] != token[0]:
            raise ParseError(f"unterminated string {token!r}", line=line)
        return token[1:-1]
    if _INT.fullmatch(token):
        return int(token)
    if _FLOAT.fullmatch(token):
        return float(token)
    return token


def _strip_comment(text):
    # a '#' opens a comment unless it sits inside quotes
    quote = None
    for i, ch in enumerate(text):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == "#":
            return text[:i]
    return text


def parse_config(data, registry=None):
    """Parse config text into a validated :class:`EnsembleConfig`.

    Member hyperparameters are checked against the registry and defaults
    are filled in.
    """
    registry = REGISTRY if registry is None else registry
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    top = {}
    members = []  # (line, {key: value})
    current = top
    for number, raw in enumerate(data.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        section = _SECTION.fullmatch(line)
        if section:
            if section.group(1) != "member":
                raise ParseError(f"unknown section [{section.group(1)}]", line=number)
            current = {}
            members.append((number, current))
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not _KEY.fullmatch(key):
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", line=number)
        if current is top and key not in DEFAULTS:
            raise ParseError(f"unknown key {key!r}", line=number)
        if key in current:
            raise ParseError(f"duplicate key {key!r}", line=number)
        current[key] = _value(value, number)

    if not members:
        raise ParseError("config defines no [member] section")
    specs = []
    for number, entries in members:
        params = dict(entries)
        name = params.pop("detector", None)
        if not isinstance(name, str):
            raise ParseError("member needs a 'detector = <name>' entry", line=number)
        specs.append(registry.validate_spec(name, params))

    options = {**DEFAULTS, **top}
    combination = options["combination"]
    if isinstance(combination, str):
        combination = COMBINATION_ALIASES.get(combination, combination)
    if options["normalization"] not in KINDS:
        raise ParseError(f"normalization must be one of {', '.join(KINDS)}, "
                         f"got {options['normalization']!r}")
    if combination not in RULES:
        raise ParseError(f"combination must be one of {', '.join(RULES)}, got {combination!r}")
    fraction = options["outlier_fraction"]
    if isinstance(fraction, str):
        raise ParseError(f"outlier_fraction must be a number, got {fraction!r}")
    return EnsembleConfig(
        members=tuple(specs),
        normalization=options["normalization"],
        combination=combination,
        outlier_fraction=fraction,
        member_names=tuple(s.name for s in specs),
    )


def _render(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_config(config):
    """Canonical text for a config; ``parse_config`` reads it back unchanged."""
    lines = [
        f"normalization = {config.normalization}",
        f"combination = {config.combination}",
        f"outlier_fraction = {_render(config.outlier_fraction)}",
    ]
    for spec in config.members:
        lines += ["", "[member]", f"detector = {spec.name}"]
        lines += [f"{k} = {_render(v)}" for k, v in spec.params.items()]
    return "\n".join(lines) + "\n"


def default_config():
    return parse_config("[member]\ndetector = knn\n")
