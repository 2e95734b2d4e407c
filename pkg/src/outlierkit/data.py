"""Benchmark dataset ingestion: CSV parsing, manifest, checksummed fetch, cache.

Manifest format, one dataset per line, tab separated and UTF-8::

    name <TAB> url <TAB> sha256 <TAB> label_column <TAB> positive_label

Blank lines and lines starting with ``#`` are skipped. Downloaded files
are cached as ``<cache_root>/<name>.csv``. They are written to a temporary
file first and renamed into place only once the sha256 matches the
manifest, so a corrupt download never leaves a file at the final path.
"""

import csv
import hashlib
import io
import os
import re
import tempfile
import urllib.parse
import urllib.request
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Label, validate_dataset
from .exceptions import (
    ChecksumMismatch,
    DuplicateDatasetName,
    MalformedChecksum,
    MalformedRow,
    MissingLabelColumn,
    NonNumericFeature,
    ParseError,
    TransportError,
    UnknownDataset,
)

CACHE_ENV = "OUTLIERKIT_CACHE"

_SHA256 = re.compile(r"[0-9a-fA-F]{64}")

BUILTIN_MANIFEST = Path(__file__).parent / "datasets" / "manifest.tsv"


# -- CSV --------------------------------------------------------------------


def _text(data):
    if isinstance(data, (bytes, bytearray)):
        return data.decode("utf-8")
    if hasattr(data, "read"):
        return _text(data.read())
    return data


def parse_csv(data, label_column=None, positive_label="1"):
    """Parse a header-first numeric CSV into a :class:`~outlierkit.core.Dataset`.

    With ``label_column`` given, that column is removed from the features and
    its tokens become labels: exactly ``positive_label`` is an outlier, any
    other token is normal. Without it, every column is a numeric feature.
    Rows are numbered from 1 (the header is row 0).
    """
    rows = [row for row in csv.reader(io.StringIO(_text(data))) if row]
    if not rows:
        raise MalformedRow(0, 1, 0)
    header = [name.strip() for name in rows[0]]
    width = len(header)
    label_pos = None
    if label_column is not None:
        if label_column not in header:
            raise MissingLabelColumn(label_column)
        label_pos = header.index(label_column)

    features, labels = [], []
    for number, row in enumerate(rows[1:], start=1):
        if len(row) != width:
            raise MalformedRow(number, width, len(row))
        values = []
        for pos, token in enumerate(row):
            if pos == label_pos:
                is_outlier = token.strip() == positive_label
                labels.append(Label.OUTLIER if is_outlier else Label.NORMAL)
                continue
            try:
                values.append(float(token))
            except ValueError:
                raise NonNumericFeature(number, header[pos], token) from None
        features.append(values)

    names = [h for pos, h in enumerate(header) if pos != label_pos]
    matrix = np.array(features, dtype=np.float64).reshape(len(features), len(names))
    return validate_dataset(matrix, labels if label_pos is not None else None, names,
                            allow_empty=True)


def _fmt(value):
    # repr() is the shortest string that parses back to the same double
    return repr(float(value))


def write_csv(dataset, label_column="label", positive_label="1", negative_label="0"):
    """Serialize a dataset so that :func:`parse_csv` reads it back unchanged."""
    names = dataset.feature_names or tuple(f"x{j}" for j in range(dataset.n_features))
    header = list(names)
    if dataset.labels is not None:
        header.append(label_column)
    lines = [",".join(header)]
    for i, row in enumerate(dataset.features.tolist()):
        cells = [_fmt(v) for v in row]
        if dataset.labels is not None:
            outlier = dataset.labels[i] is Label.OUTLIER
            cells.append(positive_label if outlier else negative_label)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# -- manifest ---------------------------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    url: str
    sha256: str
    label_column: str
    positive_label: str


@dataclass(frozen=True)
class CacheEntry:
    name: str
    path: Path
    verified: bool


def load_manifest(data, base=None):
    """Parse manifest text into entries.

    ``base`` (a directory) resolves relative URLs to ``file://`` URLs, which
    lets a manifest ship next to its CSV files.
    """
    entries, seen = [], set()
    for number, line in enumerate(_text(data).splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.rstrip("\r").split("\t")
        if len(fields) != 5:
            raise ParseError(f"expected 5 tab-separated fields, got {len(fields)}", line=number)
        name, url, sha, label_column, positive = (f.strip() for f in fields)
        if not name or not url:
            raise ParseError("name and url must be non-empty", line=number)
        if not _SHA256.fullmatch(sha):
            raise MalformedChecksum(sha, line=number)
        if name in seen:
            raise DuplicateDatasetName(name)
        seen.add(name)
        if base is not None and not urllib.parse.urlparse(url).scheme:
            url = (Path(base) / url).resolve().as_uri()
        entries.append(ManifestEntry(name, url, sha.lower(), label_column, positive))
    return entries


def read_manifest(path=BUILTIN_MANIFEST):
    path = Path(path)
    return load_manifest(path.read_bytes(), base=path.parent)


# -- fetch and cache --------------------------------------------------------


def urllib_transport(url):
    """Default transport: read the whole resource at ``url`` (http, https, file)."""
    with urllib.request.urlopen(url, timeout=60) as response:
        return response.read()


def cache_root_from_env(explicit=None):
    if explicit is not None:
        return Path(explicit)
    value = os.environ.get(CACHE_ENV)
    return Path(value) if value else None


def _sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def cache_path(entry, cache_root):
    return Path(cache_root) / f"{entry.name}.csv"


def fetch(entry, cache_root, transport=urllib_transport):
    """Make sure a verified copy of ``entry`` is in the cache and return it.

    A cached file whose checksum matches is returned without calling
    ``transport``. Anything else triggers a download.
    """
    root = Path(cache_root)
    final = cache_path(entry, root)
    if final.is_file():
        if _sha256_file(final) == entry.sha256:
            return CacheEntry(entry.name, final, True)
        final.unlink()  # stale or tampered; only verified files live at the final path

    try:
        payload = transport(entry.url)
    except Exception as exc:  # transports raise whatever their library raises
        raise TransportError(entry.url, exc) from exc
    if hasattr(payload, "read"):
        payload = payload.read()
    actual = hashlib.sha256(payload).hexdigest()
    if actual != entry.sha256:
        raise ChecksumMismatch(entry.name, entry.sha256, actual)

    root.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{entry.name}.", suffix=".part", dir=root)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        if _sha256_file(tmp) != entry.sha256:
            raise ChecksumMismatch(entry.name, entry.sha256, _sha256_file(tmp))
        os.replace(tmp, final)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return CacheEntry(entry.name, final, True)


def find_entry(name, manifest):
    for entry in manifest:
        if entry.name == name:
            return entry
    raise UnknownDataset(name)


def load_dataset(name, manifest=None, cache_root=None, transport=urllib_transport):
    """Fetch (or reuse) a manifest dataset and parse it with its label convention."""
    manifest = read_manifest() if manifest is None else manifest
    entry = find_entry(name, manifest)
    root = cache_root_from_env(cache_root)
    if root is None:
        raise ValueError(f"no cache root given and ${CACHE_ENV} is not set")
    cached = fetch(entry, root, transport)
    return parse_csv(cached.path.read_bytes(), entry.label_column or None, entry.positive_label)
