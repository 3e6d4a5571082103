"""Single-file persistence of a bench session.

A session gathers everything one dilution experiment accumulates: registered
images (by content digest; pixel data stays on disk), extraction geometry,
wavelength calibration, the blank spectrum, the current measurement, the
sample table and the fitted line. Files are canonical JSON with extension
`.specsession`: keys sorted, two-space indent, numeric arrays on one line,
floats in shortest round-trip form, non-finite floats as the strings "NaN",
"Infinity" and "-Infinity". Saving the same session twice yields identical
bytes, which makes re-runs diffable and digests meaningful.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .absorption import AbsorptionMeasurement, FLAG_OK, FLAGS
from .beer_lambert import BeerLambertFit, CalibrationSample, MODES, fit_beer_lambert
from .errors import (
    CoincidentAnchors,
    InvariantViolation,
    IoFailure,
    ParseError,
    SchemaVersionUnsupported,
    TooFewSamples,
)
from .spectrum import ORIENTATIONS, ExtractionGeometry, RawSpectrum
from .wavelength import CalibratedSpectrum, WavelengthCalibration

SCHEMA_VERSION = 1
SESSION_SUFFIX = ".specsession"

_DIGEST_RE = re.compile(r"^sha256:[0-9a-f]{64}$")
_TIMESTAMP_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$")


@dataclass(frozen=True)
class ImageRecord:
    """A registered source photograph, pinned by content digest."""

    filename: str
    digest: str


@dataclass(frozen=True)
class SampleRecord:
    """One calibration sample plus where its absorbance came from."""

    concentration: float
    absorbance: float
    label: str = ""
    image_id: str | None = None
    wavelength_nm: float | None = None

    def __post_init__(self):
        if not self.concentration > 0:
            raise ValueError(f"concentration must be > 0, got {self.concentration}")

    def as_calibration_sample(self) -> CalibrationSample:
        return CalibrationSample(
            concentration=self.concentration,
            absorbance=self.absorbance,
            label=self.label,
        )


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """Persisted transmittance/absorbance table.

    Mirrors the analysis surface of a live measurement (wavelengths,
    absorbance, flags, ok_mask) so peak search and interpolation work on it
    directly; the source spectra themselves are not retained.
    """

    wavelengths: np.ndarray
    transmittance: np.ndarray
    absorbance: np.ndarray
    flags: tuple
    image_id: str | None = None

    def __post_init__(self):
        w = np.asarray(self.wavelengths, dtype=np.float64)
        t = np.asarray(self.transmittance, dtype=np.float64)
        a = np.asarray(self.absorbance, dtype=np.float64)
        if not (w.shape == t.shape == a.shape and w.ndim == 1 and w.shape[0] >= 1):
            raise ValueError("wavelengths, transmittance, absorbance must be "
                             "1-D, non-empty and of equal length")
        if w.shape[0] > 1 and not np.all(np.diff(w) > 0):
            raise ValueError("wavelengths must be strictly increasing")
        flags = tuple(str(f) for f in self.flags)
        if len(flags) != w.shape[0]:
            raise ValueError("one flag per point required")
        for f in flags:
            if f not in FLAGS:
                raise ValueError(f"unknown flag {f!r}")
        object.__setattr__(self, "wavelengths", w)
        object.__setattr__(self, "transmittance", t)
        object.__setattr__(self, "absorbance", a)
        object.__setattr__(self, "flags", flags)

    @classmethod
    def from_measurement(cls, measurement: AbsorptionMeasurement,
                         image_id: str | None = None) -> "MeasurementRecord":
        return cls(
            wavelengths=measurement.wavelengths,
            transmittance=measurement.transmittance,
            absorbance=measurement.absorbance,
            flags=measurement.flags,
            image_id=image_id,
        )

    @property
    def n(self) -> int:
        return self.wavelengths.shape[0]

    def ok_mask(self) -> np.ndarray:
        return np.array([f == FLAG_OK for f in self.flags])


@dataclass(eq=False)
class Session:
    """Everything one experiment accumulates, as a plain mutable value."""

    schema_version: int = SCHEMA_VERSION
    images: dict = field(default_factory=dict)
    geometry: ExtractionGeometry | None = None
    wavelength_cal: WavelengthCalibration | None = None
    raw_spectrum: RawSpectrum | None = None
    raw_image_id: str | None = None
    blank_spectrum: CalibratedSpectrum | None = None
    measurement: MeasurementRecord | None = None
    samples: list = field(default_factory=list)
    fit: BeerLambertFit | None = None
    created: str = ""
    modified: str = ""


def now_iso() -> str:
    """Current UTC time, whole seconds, e.g. 2026-08-19T09:30:00Z."""
    return datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def shared_analysis_wavelength(samples):
    """The one wavelength all samples were read at, or None if they differ."""
    wavelengths = {s.wavelength_nm for s in samples}
    if len(wavelengths) == 1:
        return next(iter(wavelengths))
    return None


def new_session(timestamp: str | None = None) -> Session:
    ts = now_iso() if timestamp is None else timestamp
    return Session(created=ts, modified=ts)


def register_image(session: Session, filename: str, data: bytes) -> str:
    """Record an image by content digest; returns its id.

    Ids are derived from the digest, so registering identical bytes twice is
    a no-op and yields the same id.
    """
    digest = "sha256:" + hashlib.sha256(data).hexdigest()
    image_id = digest[7:19]
    session.images[image_id] = ImageRecord(filename=filename, digest=digest)
    return image_id


# ---------------------------------------------------------------------------
# canonical serialization


def _float_token(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return repr(x)


def _scalar_token(value) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _float_token(value)
    raise TypeError(f"not a scalar: {type(value).__name__}")


def _is_scalar(value) -> bool:
    return value is None or isinstance(value, (str, bool, int, float))


def _render(value, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if _is_scalar(value):
        return _scalar_token(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        parts = [f"{inner}{json.dumps(k, ensure_ascii=False)}: {_render(v, indent + 1)}"
                 for k, v in sorted(value.items())]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        items = list(value)
        if all(_is_scalar(v) for v in items):
            return "[" + ", ".join(_scalar_token(v) for v in items) + "]"
        parts = [f"{inner}{_render(v, indent + 1)}" for v in items]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _floats(array) -> list:
    return [float(x) for x in np.asarray(array, dtype=np.float64)]


def _session_to_jsonable(session: Session) -> dict:
    images = {
        image_id: {"digest": rec.digest, "filename": rec.filename}
        for image_id, rec in session.images.items()
    }
    geometry = None
    if session.geometry is not None:
        g = session.geometry
        geometry = {
            "band_half_width": g.band_half_width,
            "col_end": g.col_end,
            "col_start": g.col_start,
            "orientation": g.orientation,
            "row": g.row,
        }
    cal = None
    if session.wavelength_cal is not None:
        c = session.wavelength_cal
        cal = {"lambda1": c.lambda1, "lambda2": c.lambda2, "p1": c.p1, "p2": c.p2}
    raw = None
    if session.raw_spectrum is not None:
        s = session.raw_spectrum
        raw = {
            "b": _floats(s.b),
            "g": _floats(s.g),
            "image_id": session.raw_image_id,
            "r": _floats(s.r),
        }
    blank = None
    if session.blank_spectrum is not None:
        s = session.blank_spectrum
        blank = {
            "b": _floats(s.b),
            "combined": _floats(s.combined),
            "g": _floats(s.g),
            "r": _floats(s.r),
            "wavelengths": _floats(s.wavelengths),
        }
    measurement = None
    if session.measurement is not None:
        m = session.measurement
        measurement = {
            "absorbance": _floats(m.absorbance),
            "flags": list(m.flags),
            "image_id": m.image_id,
            "transmittance": _floats(m.transmittance),
            "wavelengths": _floats(m.wavelengths),
        }
    samples = [
        {
            "absorbance": s.absorbance,
            "concentration": s.concentration,
            "image_id": s.image_id,
            "label": s.label,
            "wavelength_nm": s.wavelength_nm,
        }
        for s in session.samples
    ]
    fit = None
    if session.fit is not None:
        f = session.fit
        fit = {
            "analysis_wavelength_nm": f.analysis_wavelength_nm,
            "intercept": f.intercept,
            "mode": f.mode,
            "n_samples": f.n_samples,
            "r_squared": f.r_squared,
            "slope": f.slope,
        }
    return {
        "blank_spectrum": blank,
        "created": session.created,
        "fit": fit,
        "geometry": geometry,
        "images": images,
        "measurement": measurement,
        "modified": session.modified,
        "raw_spectrum": raw,
        "samples": samples,
        "schema_version": session.schema_version,
        "wavelength_cal": cal,
    }


def canonical_session_json(session: Session) -> str:
    return _render(_session_to_jsonable(session)) + "\n"


def session_equal(a: Session, b: Session, ignore_timestamps: bool = False) -> bool:
    """Structural equality via the canonical form (bit-exact on floats)."""
    da, db = _session_to_jsonable(a), _session_to_jsonable(b)
    if ignore_timestamps:
        for d in (da, db):
            d["created"] = ""
            d["modified"] = ""
    return _render(da) == _render(db)


def content_fingerprint(session: Session) -> str:
    """Canonical text with timestamps blanked; equal iff content is equal."""
    d = _session_to_jsonable(session)
    d["created"] = ""
    d["modified"] = ""
    return _render(d)


def save_session(session: Session, destination) -> None:
    text = canonical_session_json(session)
    try:
        with open(destination, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {destination}: {exc}") from exc


# ---------------------------------------------------------------------------
# parsing and validation


def _require_keys(obj: dict, keys, where: str) -> None:
    expected = set(keys)
    actual = set(obj)
    if actual != expected:
        missing = sorted(expected - actual)
        extra = sorted(actual - expected)
        detail = []
        if missing:
            detail.append(f"missing {missing}")
        if extra:
            detail.append(f"unexpected {extra}")
        raise ParseError(f"{where}: " + ", ".join(detail))


def _parse_float(value, where: str) -> float:
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if value == "NaN":
        return float("nan")
    if value == "Infinity":
        return float("inf")
    if value == "-Infinity":
        return float("-inf")
    raise ParseError(f"{where}: expected a number, got {value!r}")


def _parse_optional_float(value, where: str):
    return None if value is None else _parse_float(value, where)


def _parse_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return value


def _parse_str(value, where: str) -> str:
    if not isinstance(value, str):
        raise ParseError(f"{where}: expected a string, got {value!r}")
    return value


def _parse_optional_str(value, where: str):
    return None if value is None else _parse_str(value, where)


def _parse_float_array(value, where: str) -> np.ndarray:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected an array")
    return np.array([_parse_float(v, where) for v in value], dtype=np.float64)


def _parse_timestamp(value, where: str) -> str:
    ts = _parse_str(value, where)
    if not _TIMESTAMP_RE.match(ts):
        raise ParseError(f"{where}: not an ISO-8601 UTC timestamp: {ts!r}")
    return ts


def _violation(where: str, exc: Exception) -> InvariantViolation:
    return InvariantViolation(f"{where}: {exc}")


def load_session(source) -> Session:
    """Read, parse and fully validate a session file."""
    try:
        with open(source, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {source}: {exc}") from exc
    return parse_session(text)


def parse_session(text: str) -> Session:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")

    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionUnsupported(
            f"schema_version {version!r} is not supported (expected {SCHEMA_VERSION})"
        )
    _require_keys(doc, (
        "blank_spectrum", "created", "fit", "geometry", "images", "measurement",
        "modified", "raw_spectrum", "samples", "schema_version", "wavelength_cal",
    ), "session")

    images = {}
    if not isinstance(doc["images"], dict):
        raise ParseError("images: expected an object")
    for image_id, rec in doc["images"].items():
        if not isinstance(rec, dict):
            raise ParseError(f"images[{image_id!r}]: expected an object")
        _require_keys(rec, ("digest", "filename"), f"images[{image_id!r}]")
        digest = _parse_str(rec["digest"], "digest")
        if not _DIGEST_RE.match(digest):
            raise _violation(f"images[{image_id!r}]",
                             ValueError(f"malformed digest {digest!r}"))
        images[_parse_str(image_id, "image id")] = ImageRecord(
            filename=_parse_str(rec["filename"], "filename"), digest=digest)

    def known_image(image_id, where):
        if image_id is not None and image_id not in images:
            raise _violation(where, ValueError(f"unknown image id {image_id!r}"))
        return image_id

    geometry = None
    if doc["geometry"] is not None:
        g = doc["geometry"]
        if not isinstance(g, dict):
            raise ParseError("geometry: expected an object")
        _require_keys(g, ("band_half_width", "col_end", "col_start",
                          "orientation", "row"), "geometry")
        orientation = _parse_str(g["orientation"], "geometry.orientation")
        if orientation not in ORIENTATIONS:
            raise ParseError(f"geometry.orientation: unknown value {orientation!r}")
        try:
            geometry = ExtractionGeometry(
                row=_parse_int(g["row"], "geometry.row"),
                band_half_width=_parse_int(g["band_half_width"],
                                           "geometry.band_half_width"),
                col_start=_parse_int(g["col_start"], "geometry.col_start"),
                col_end=_parse_int(g["col_end"], "geometry.col_end"),
                orientation=orientation,
            )
        except ValueError as exc:
            raise _violation("geometry", exc) from exc

    cal = None
    if doc["wavelength_cal"] is not None:
        c = doc["wavelength_cal"]
        if not isinstance(c, dict):
            raise ParseError("wavelength_cal: expected an object")
        _require_keys(c, ("lambda1", "lambda2", "p1", "p2"), "wavelength_cal")
        try:
            cal = WavelengthCalibration(
                p1=_parse_float(c["p1"], "wavelength_cal.p1"),
                lambda1=_parse_float(c["lambda1"], "wavelength_cal.lambda1"),
                p2=_parse_float(c["p2"], "wavelength_cal.p2"),
                lambda2=_parse_float(c["lambda2"], "wavelength_cal.lambda2"),
            )
        except (ValueError, CoincidentAnchors) as exc:
            raise _violation("wavelength_cal", exc) from exc

    raw = None
    raw_image_id = None
    if doc["raw_spectrum"] is not None:
        r = doc["raw_spectrum"]
        if not isinstance(r, dict):
            raise ParseError("raw_spectrum: expected an object")
        _require_keys(r, ("b", "g", "image_id", "r"), "raw_spectrum")
        if geometry is None:
            raise _violation("raw_spectrum",
                             ValueError("present without extraction geometry"))
        raw_image_id = known_image(
            _parse_optional_str(r["image_id"], "raw_spectrum.image_id"),
            "raw_spectrum.image_id")
        red = _parse_float_array(r["r"], "raw_spectrum.r")
        green = _parse_float_array(r["g"], "raw_spectrum.g")
        blue = _parse_float_array(r["b"], "raw_spectrum.b")
        try:
            raw = RawSpectrum(r=red, g=green, b=blue,
                              combined=(red + green + blue) / 3.0,
                              source_geometry=geometry)
        except ValueError as exc:
            raise _violation("raw_spectrum", exc) from exc

    blank = None
    if doc["blank_spectrum"] is not None:
        b = doc["blank_spectrum"]
        if not isinstance(b, dict):
            raise ParseError("blank_spectrum: expected an object")
        _require_keys(b, ("b", "combined", "g", "r", "wavelengths"),
                      "blank_spectrum")
        try:
            blank = CalibratedSpectrum(
                wavelengths=_parse_float_array(b["wavelengths"],
                                               "blank_spectrum.wavelengths"),
                r=_parse_float_array(b["r"], "blank_spectrum.r"),
                g=_parse_float_array(b["g"], "blank_spectrum.g"),
                b=_parse_float_array(b["b"], "blank_spectrum.b"),
                combined=_parse_float_array(b["combined"],
                                            "blank_spectrum.combined"),
            )
        except ValueError as exc:
            raise _violation("blank_spectrum", exc) from exc

    measurement = None
    if doc["measurement"] is not None:
        m = doc["measurement"]
        if not isinstance(m, dict):
            raise ParseError("measurement: expected an object")
        _require_keys(m, ("absorbance", "flags", "image_id", "transmittance",
                          "wavelengths"), "measurement")
        if not isinstance(m["flags"], list):
            raise ParseError("measurement.flags: expected an array")
        try:
            measurement = MeasurementRecord(
                wavelengths=_parse_float_array(m["wavelengths"],
                                               "measurement.wavelengths"),
                transmittance=_parse_float_array(m["transmittance"],
                                                 "measurement.transmittance"),
                absorbance=_parse_float_array(m["absorbance"],
                                              "measurement.absorbance"),
                flags=tuple(_parse_str(f, "measurement.flags") for f in m["flags"]),
                image_id=known_image(
                    _parse_optional_str(m["image_id"], "measurement.image_id"),
                    "measurement.image_id"),
            )
        except ValueError as exc:
            raise _violation("measurement", exc) from exc

    if not isinstance(doc["samples"], list):
        raise ParseError("samples: expected an array")
    samples = []
    for i, s in enumerate(doc["samples"]):
        where = f"samples[{i}]"
        if not isinstance(s, dict):
            raise ParseError(f"{where}: expected an object")
        _require_keys(s, ("absorbance", "concentration", "image_id", "label",
                          "wavelength_nm"), where)
        try:
            samples.append(SampleRecord(
                concentration=_parse_float(s["concentration"],
                                           f"{where}.concentration"),
                absorbance=_parse_float(s["absorbance"], f"{where}.absorbance"),
                label=_parse_str(s["label"], f"{where}.label"),
                image_id=known_image(
                    _parse_optional_str(s["image_id"], f"{where}.image_id"),
                    f"{where}.image_id"),
                wavelength_nm=_parse_optional_float(s["wavelength_nm"],
                                                    f"{where}.wavelength_nm"),
            ))
        except ValueError as exc:
            raise _violation(where, exc) from exc

    fit = None
    if doc["fit"] is not None:
        f = doc["fit"]
        if not isinstance(f, dict):
            raise ParseError("fit: expected an object")
        _require_keys(f, ("analysis_wavelength_nm", "intercept", "mode",
                          "n_samples", "r_squared", "slope"), "fit")
        mode = _parse_str(f["mode"], "fit.mode")
        if mode not in MODES:
            raise ParseError(f"fit.mode: unknown value {mode!r}")
        try:
            fit = BeerLambertFit(
                slope=_parse_float(f["slope"], "fit.slope"),
                intercept=_parse_float(f["intercept"], "fit.intercept"),
                r_squared=_parse_float(f["r_squared"], "fit.r_squared"),
                n_samples=_parse_int(f["n_samples"], "fit.n_samples"),
                mode=mode,
                analysis_wavelength_nm=_parse_optional_float(
                    f["analysis_wavelength_nm"], "fit.analysis_wavelength_nm"),
            )
        except ValueError as exc:
            raise _violation("fit", exc) from exc
        _check_fit_reproducible(fit, samples)

    session = Session(
        schema_version=SCHEMA_VERSION,
        images=images,
        geometry=geometry,
        wavelength_cal=cal,
        raw_spectrum=raw,
        raw_image_id=raw_image_id,
        blank_spectrum=blank,
        measurement=measurement,
        samples=samples,
        fit=fit,
        created=_parse_timestamp(doc["created"], "created"),
        modified=_parse_timestamp(doc["modified"], "modified"),
    )
    return session


def _close(a: float, b: float, tol: float = 1e-12) -> bool:
    if math.isnan(a) and math.isnan(b):
        return True
    return abs(a - b) <= tol


def _check_fit_reproducible(fit: BeerLambertFit, samples) -> None:
    """The stored fit must match a re-fit of the stored samples to 1e-12."""
    try:
        refit = fit_beer_lambert(
            [s.as_calibration_sample() for s in samples],
            mode=fit.mode,
            analysis_wavelength_nm=fit.analysis_wavelength_nm,
        )
    except TooFewSamples as exc:
        raise InvariantViolation(
            f"fit reproducibility: cannot re-fit stored samples ({exc})"
        ) from exc
    if (refit.n_samples != fit.n_samples
            or not _close(refit.slope, fit.slope)
            or not _close(refit.intercept, fit.intercept)
            or not _close(refit.r_squared, fit.r_squared)):
        raise InvariantViolation(
            "fit reproducibility: stored fit "
            f"(slope={fit.slope!r}, intercept={fit.intercept!r}, "
            f"r_squared={fit.r_squared!r}, n_samples={fit.n_samples}) "
            "does not match a re-fit of the stored samples "
            f"(slope={refit.slope!r}, intercept={refit.intercept!r}, "
            f"r_squared={refit.r_squared!r}, n_samples={refit.n_samples})"
        )
