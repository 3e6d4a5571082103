"""Error taxonomy for the spectrophotometry engine.

Every error carries a stable kebab-case ``code`` so the CLI and the HTTP
service can surface it verbatim without string matching on messages.
"""


class SpectraError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "error"


class IoFailure(SpectraError):
    code = "io-failure"


# --- image decoding ---------------------------------------------------------

class MalformedImage(SpectraError):
    code = "malformed-image"


class UnsupportedFormat(SpectraError):
    code = "unsupported-format"


# --- extraction / smoothing -------------------------------------------------

class GeometryOutOfBounds(SpectraError):
    code = "geometry-out-of-bounds"


class WindowEven(SpectraError):
    code = "window-even"


class WindowTooLarge(SpectraError):
    code = "window-too-large"


# --- wavelength calibration / resampling ------------------------------------

class CoincidentAnchors(SpectraError):
    code = "coincident-anchors"


class GridOutOfRange(SpectraError):
    code = "grid-out-of-range"


# --- absorption measurement ---------------------------------------------------

class NoOverlap(SpectraError):
    code = "no-overlap"


class AllPointsFloored(SpectraError):
    code = "all-points-floored"


class EmptyRange(SpectraError):
    code = "empty-range"


class WavelengthOutOfRange(SpectraError):
    code = "wavelength-out-of-range"


class BracketingPointsFlagged(SpectraError):
    code = "bracketing-points-flagged"


# --- calibration line fitting -------------------------------------------------

class TooFewSamples(SpectraError):
    code = "too-few-samples"


class DegenerateDesign(SpectraError):
    code = "degenerate-design"


class SlopeTooSmall(SpectraError):
    code = "slope-too-small"


# --- session persistence ------------------------------------------------------

class ParseError(SpectraError):
    code = "parse-error"


class SchemaVersionUnsupported(SpectraError):
    code = "schema-version-unsupported"


class InvariantViolation(SpectraError):
    code = "invariant-violation"


# --- workflow state (a step ran before its prerequisite) ----------------------

class MissingGeometry(SpectraError):
    code = "no-geometry"


class MissingCalibration(SpectraError):
    code = "no-calibration"


class MissingBlank(SpectraError):
    code = "no-blank"


class MissingMeasurement(SpectraError):
    code = "no-measurement"


class MissingFit(SpectraError):
    code = "no-fit"


class MissingSpectrum(SpectraError):
    code = "no-spectrum"


class UnknownImage(SpectraError):
    code = "unknown-image"
