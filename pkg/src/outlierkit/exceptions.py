"""Exception hierarchy.

Every error raised on purpose by the toolkit derives from
:class:`OutlierKitError`, so callers (and the CLI) can separate data or
configuration problems from programming bugs. Most classes also inherit from
the closest builtin so that ``except ValueError`` keeps working.
"""


class OutlierKitError(Exception):
    """Base class for all toolkit errors."""


# -- data model -------------------------------------------------------------


class EmptyData(OutlierKitError, ValueError):
    pass


class NonFiniteValue(OutlierKitError, ValueError):
    def __init__(self, row, column):
        self.row = row
        self.column = column
        super().__init__(f"non-finite value at row {row}, column {column}")


class LabelLengthMismatch(OutlierKitError, ValueError):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"expected {expected} labels, got {got}")


class DuplicateFeatureName(OutlierKitError, ValueError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"duplicate feature name {name!r}")


class InvalidLabel(OutlierKitError, ValueError):
    pass


class DimensionMismatch(OutlierKitError, ValueError):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"expected {expected} features, got {got}")


class InsufficientData(OutlierKitError, ValueError):
    pass


class NotFitted(OutlierKitError, AttributeError):
    pass


# -- neighbor search --------------------------------------------------------


class KTooLarge(InsufficientData):
    def __init__(self, k, available):
        self.k = k
        self.available = available
        super().__init__(f"k={k} exceeds the {available} available neighbors")


class NonPositiveRadius(OutlierKitError, ValueError):
    def __init__(self, radius):
        self.radius = radius
        super().__init__(f"radius must be > 0, got {radius}")


# -- registry ---------------------------------------------------------------


class UnknownDetector(OutlierKitError, LookupError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown detector {name!r}")

    def __str__(self):
        return self.args[0]


class DuplicateName(OutlierKitError, ValueError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"detector {name!r} is already registered")


class InvalidHyperparameter(OutlierKitError, ValueError):
    pass


class UnknownParameter(InvalidHyperparameter):
    def __init__(self, name, detector=None):
        self.name = name
        self.detector = detector
        where = f" for detector {detector!r}" if detector else ""
        super().__init__(f"unknown parameter {name!r}{where}")


class ConstraintViolation(InvalidHyperparameter):
    def __init__(self, name, constraint, value=None):
        self.name = name
        self.constraint = constraint
        self.value = value
        super().__init__(f"{name}={value!r} violates constraint: {constraint}")


# -- score conversion -------------------------------------------------------


class EmptyScores(OutlierKitError, ValueError):
    pass


class WrongCalibrationKind(OutlierKitError, ValueError):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"calibration kind {got!r} cannot be used here; need {expected!r}")


class FractionOutOfRange(OutlierKitError, ValueError):
    def __init__(self, fraction):
        self.fraction = fraction
        super().__init__(f"outlier_fraction must lie in (0, 1), got {fraction!r}")


class EmptyMatrix(OutlierKitError, ValueError):
    pass


class UnnormalizedInput(OutlierKitError, ValueError):
    pass


class MemberError(OutlierKitError):
    """Wraps an error raised by one ensemble member, recording its position."""

    def __init__(self, position, cause):
        self.position = position
        self.cause = cause
        super().__init__(f"member {position}: {cause}")


# -- ingestion --------------------------------------------------------------


class MalformedRow(OutlierKitError, ValueError):
    def __init__(self, row, expected, got):
        self.row = row
        self.expected = expected
        self.got = got
        super().__init__(f"row {row}: expected {expected} columns, got {got}")


class NonNumericFeature(OutlierKitError, ValueError):
    def __init__(self, row, column, token):
        self.row = row
        self.column = column
        self.token = token
        super().__init__(f"row {row}, column {column!r}: non-numeric value {token!r}")


class MissingLabelColumn(OutlierKitError, ValueError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"label column {column!r} not found in header")


class ParseError(OutlierKitError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class DuplicateDatasetName(OutlierKitError, ValueError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"dataset {name!r} appears more than once in the manifest")


class MalformedChecksum(OutlierKitError, ValueError):
    def __init__(self, checksum, line=None):
        self.checksum = checksum
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}sha256 must be 64 hex characters, got {checksum!r}")


class UnknownDataset(OutlierKitError, LookupError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown dataset {name!r}")

    def __str__(self):
        return self.args[0]


class TransportError(OutlierKitError, OSError):
    def __init__(self, url, cause):
        self.url = url
        self.cause = cause
        super().__init__(f"failed to fetch {url}: {cause}")


class ChecksumMismatch(OutlierKitError, ValueError):
    def __init__(self, name, expected, actual):
        self.name = name
        self.expected = expected
        self.actual = actual
        super().__init__(f"checksum mismatch for {name!r}: expected {expected}, got {actual}")


# -- evaluation -------------------------------------------------------------


class SingleClass(OutlierKitError, ValueError):
    def __init__(self, missing):
        self.missing = missing
        super().__init__(f"labels contain no {missing!r} instances")


class NTooLarge(OutlierKitError, ValueError):
    def __init__(self, n, available):
        self.n = n
        self.available = available
        super().__init__(f"n={n} exceeds the {available} scored instances")


class LengthMismatch(OutlierKitError, ValueError):
    def __init__(self, left, right):
        self.left = left
        self.right = right
        super().__init__(f"length mismatch: {left} vs {right}")
