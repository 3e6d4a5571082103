"""HTTP facade over the analysis engine and the session store.

One live session per server. Every numeric result comes straight from the
core functions; this module only moves data. Mutations are serialized behind
a single lock and bump an integer revision; clients can send If-Match with
the revision they last saw and get 409 when someone else wrote in between.

Error shape is uniform: {"error": <kebab-case code>, "detail": <message>}.
Status codes: 400 malformed request bodies, 404 unknown resources, 409 stale
revision, 422 domain rule violations (the code names the violated rule).
Non-finite numbers travel as the strings "NaN", "Infinity", "-Infinity".
"""

from __future__ import annotations

import asyncio
import io
import math
import os
from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field
from starlette.exceptions import HTTPException as StarletteHTTPException

from .absorption import absorbance_at, lambda_max, measure_absorption
from .beer_lambert import fit_beer_lambert, predict_concentration
from .errors import (
    IoFailure,
    MissingBlank,
    MissingCalibration,
    MissingFit,
    MissingGeometry,
    MissingMeasurement,
    MissingSpectrum,
    SpectraError,
    TooFewSamples,
    UnknownImage,
)
from .export import (
    format_fit_record,
    write_measurement_csv,
    write_raw_spectrum_csv,
    write_spectrum_csv,
)
from .image import RasterImage, decode_image
from .session import (
    MeasurementRecord,
    SampleRecord,
    Session,
    canonical_session_json,
    content_fingerprint,
    load_session,
    new_session,
    now_iso,
    parse_session,
    register_image,
    save_session,
    shared_analysis_wavelength,
)
from .spectrum import ExtractionGeometry, extract_raw_spectrum, smooth
from .svgplot import (
    plot_calibration_svg,
    plot_measurement_svg,
    plot_raw_spectrum_svg,
    plot_spectrum_svg,
)
from .wavelength import apply_calibration, make_wavelength_calibration

DEFAULT_ADDR = "127.0.0.1:8300"
THUMBNAIL_MAX_SIDE = 240


class _BadRequest(Exception):
    """Request shape is wrong in a way the schema cannot express."""


class _StaleRevision(Exception):
    def __init__(self, current: int):
        super().__init__(f"revision {current} is current")
        self.current = current


def _float_cell(x: float):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return x


def _float_list(values) -> list:
    return [_float_cell(v) for v in values]


class BenchState:
    """The single live session plus request-level bookkeeping."""

    def __init__(self, session_path=None):
        self.lock = asyncio.Lock()
        self.session_path = session_path
        if session_path is not None and os.path.exists(session_path):
            self.session = load_session(session_path)
        else:
            self.session = new_session()
        self.revision = 0
        self.saved_fingerprint = content_fingerprint(self.session)
        self.image_bytes: dict = {}
        self.image_pixels: dict = {}

    def commit(self) -> int:
        """Close a mutation request: bump revision, persist if changed."""
        self.revision += 1
        fingerprint = content_fingerprint(self.session)
        if fingerprint != self.saved_fingerprint:
            self.session.modified = now_iso()
            if self.session_path is not None:
                save_session(self.session, self.session_path)
            self.saved_fingerprint = fingerprint
        return self.revision

    def pixels_of(self, image_id: str) -> RasterImage:
        if image_id not in self.session.images:
            raise UnknownImage(f"no image with id {image_id!r}")
        pixels = self.image_pixels.get(image_id)
        if pixels is None:
            raise UnknownImage(
                f"image {image_id!r} is registered but its pixels were not "
                "uploaded to this server instance"
            )
        return pixels


# --- request bodies ----------------------------------------------------------


class GeometryBody(BaseModel):
    row: int
    band_half_width: int
    col_start: int
    col_end: int
    orientation: Literal["left-to-right", "right-to-left"] = "left-to-right"

    def to_geometry(self) -> ExtractionGeometry:
        return ExtractionGeometry(
            row=self.row,
            band_half_width=self.band_half_width,
            col_start=self.col_start,
            col_end=self.col_end,
            orientation=self.orientation,
        )


class ExtractBody(BaseModel):
    image_id: str
    geometry: GeometryBody
    smooth: int = 1


class AnchorBody(BaseModel):
    pixel: float
    wavelength_nm: float


class CalibrationBody(BaseModel):
    anchors: list[AnchorBody] = Field(min_length=2, max_length=2)


class BlankBody(BaseModel):
    image_id: str
    smooth: int = 1


class MeasureBody(BaseModel):
    image_id: str
    smooth: int = 1


class SampleBody(BaseModel):
    concentration: float
    wavelength: float | Literal["auto"] = "auto"
    label: str = ""


class FitBody(BaseModel):
    mode: Literal["with-intercept", "through-origin"] = "with-intercept"


class PredictBody(BaseModel):
    absorbance: Optional[float] = None
    image_id: Optional[str] = None
    smooth: int = 1


# --- JSON views --------------------------------------------------------------


def _geometry_json(g: ExtractionGeometry) -> dict:
    return {
        "row": g.row,
        "band_half_width": g.band_half_width,
        "col_start": g.col_start,
        "col_end": g.col_end,
        "orientation": g.orientation,
    }


def _raw_spectrum_json(raw, image_id) -> dict:
    return {
        "pixels": _float_list(raw.pixel_axis()),
        "r": _float_list(raw.r),
        "g": _float_list(raw.g),
        "b": _float_list(raw.b),
        "combined": _float_list(raw.combined),
        "image_id": image_id,
        "geometry": _geometry_json(raw.source_geometry),
    }


def _measurement_json(m) -> dict:
    return {
        "wavelengths": _float_list(m.wavelengths),
        "transmittance": _float_list(m.transmittance),
        "absorbance": _float_list(m.absorbance),
        "flags": list(m.flags),
    }


def _samples_json(session: Session) -> list:
    return [
        {
            "concentration": _float_cell(s.concentration),
            "absorbance": _float_cell(s.absorbance),
            "label": s.label,
            "image_id": s.image_id,
            "wavelength_nm": (None if s.wavelength_nm is None
                              else _float_cell(s.wavelength_nm)),
        }
        for s in session.samples
    ]


def _fit_json(fit) -> dict:
    return {
        "slope": _float_cell(fit.slope),
        "intercept": _float_cell(fit.intercept),
        "r_squared": _float_cell(fit.r_squared),
        "n_samples": fit.n_samples,
        "analysis_wavelength_nm": (None if fit.analysis_wavelength_nm is None
                                   else _float_cell(fit.analysis_wavelength_nm)),
        "mode": fit.mode,
    }


def _calibration_json(cal) -> dict:
    return {
        "p1": _float_cell(cal.p1),
        "lambda1": _float_cell(cal.lambda1),
        "p2": _float_cell(cal.p2),
        "lambda2": _float_cell(cal.lambda2),
        "slope_nm_per_px": _float_cell(cal.slope),
        "intercept_nm": _float_cell(cal.intercept),
    }


# --- application -------------------------------------------------------------


def _default_ui_dir():
    env = os.environ.get("PHOTOSPEC_UI_DIR")
    if env:
        return Path(env)
    repo = Path(__file__).resolve().parents[2]
    candidate = repo / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def create_app(session_path=None, ui_dir=None) -> FastAPI:
    state = BenchState(session_path=session_path)
    app = FastAPI(title="photospec bench", docs_url=None, redoc_url=None)
    app.state.bench = state

    def check_if_match(request: Request) -> None:
        header = request.headers.get("if-match")
        if header is None:
            return
        token = header.strip().strip('"')
        if token != str(state.revision):
            raise _StaleRevision(state.revision)

    # -- error shaping --

    @app.exception_handler(SpectraError)
    async def _domain_error(_, exc: SpectraError):
        if isinstance(exc, UnknownImage):
            status = 404
        elif isinstance(exc, IoFailure):
            status = 500
        else:
            status = 422
        return JSONResponse(status_code=status,
                            content={"error": exc.code, "detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(_, exc: ValueError):
        return JSONResponse(status_code=422,
                            content={"error": "invalid-value", "detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _schema_error(_, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"error": "schema-violation",
                                     "detail": str(exc)})

    @app.exception_handler(_BadRequest)
    async def _bad_request(_, exc: _BadRequest):
        return JSONResponse(status_code=400,
                            content={"error": "schema-violation",
                                     "detail": str(exc)})

    @app.exception_handler(_StaleRevision)
    async def _stale(_, exc: _StaleRevision):
        return JSONResponse(status_code=409,
                            content={"error": "stale-revision",
                                     "detail": str(exc),
                                     "revision": exc.current})

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(_, exc: StarletteHTTPException):
        code = "not-found" if exc.status_code == 404 else "http-error"
        return JSONResponse(status_code=exc.status_code,
                            content={"error": code, "detail": str(exc.detail)})

    # -- images --

    @app.post("/api/images")
    async def upload_image(request: Request):
        async with state.lock:
            check_if_match(request)
            data = await request.body()
            if not data:
                raise _BadRequest("empty body; send PNG or JPEG bytes")
            fmt = "jpeg" if data[:2] == b"\xff\xd8" else "png"
            image = decode_image(data, fmt)
            filename = request.query_params.get("filename") or f"upload.{fmt}"
            image_id = register_image(state.session, filename, data)
            state.image_bytes[image_id] = data
            state.image_pixels[image_id] = image
            revision = state.commit()
            return {"image_id": image_id, "width": image.width,
                    "height": image.height, "revision": revision}

    @app.get("/api/images/{image_id}/thumbnail")
    async def thumbnail(image_id: str):
        from PIL import Image

        async with state.lock:
            image = state.pixels_of(image_id)
        pil = Image.fromarray(image.pixels if image.pixels.dtype == "uint8"
                              else image.pixels.round().astype("uint8"), "RGB")
        pil.thumbnail((THUMBNAIL_MAX_SIDE, THUMBNAIL_MAX_SIDE))
        buffer = io.BytesIO()
        pil.save(buffer, format="PNG")
        return Response(content=buffer.getvalue(), media_type="image/png")

    # -- pipeline --

    @app.post("/api/spectra/extract")
    async def extract(body: ExtractBody, request: Request):
        async with state.lock:
            check_if_match(request)
            image = state.pixels_of(body.image_id)
            geometry = body.geometry.to_geometry()
            raw = smooth(extract_raw_spectrum(image, geometry), body.smooth)
            state.session.geometry = geometry
            state.session.raw_spectrum = raw
            state.session.raw_image_id = body.image_id
            revision = state.commit()
            out = _raw_spectrum_json(raw, body.image_id)
            out["revision"] = revision
            return out

    @app.put("/api/calibration")
    async def put_calibration(body: CalibrationBody, request: Request):
        async with state.lock:
            check_if_match(request)
            cal = make_wavelength_calibration(
                (body.anchors[0].pixel, body.anchors[0].wavelength_nm),
                (body.anchors[1].pixel, body.anchors[1].wavelength_nm),
            )
            state.session.wavelength_cal = cal
            revision = state.commit()
            out = _calibration_json(cal)
            out["revision"] = revision
            return out

    def _calibrated_capture(image_id: str, window: int):
        session = state.session
        if session.geometry is None:
            raise MissingGeometry("no extraction geometry; extract first")
        if session.wavelength_cal is None:
            raise MissingCalibration("no wavelength calibration set")
        image = state.pixels_of(image_id)
        raw = smooth(extract_raw_spectrum(image, session.geometry), window)
        return apply_calibration(raw, session.wavelength_cal)

    @app.put("/api/blank")
    async def put_blank(body: BlankBody, request: Request):
        async with state.lock:
            check_if_match(request)
            spectrum = _calibrated_capture(body.image_id, body.smooth)
            state.session.blank_spectrum = spectrum
            revision = state.commit()
            # the blank against itself: flat T = 1, A = 0, floored points visible
            reference = measure_absorption(spectrum, spectrum)
            out = _measurement_json(reference)
            out["image_id"] = body.image_id
            out["revision"] = revision
            return out

    @app.post("/api/measure")
    async def measure(body: MeasureBody, request: Request):
        async with state.lock:
            check_if_match(request)
            session = state.session
            if session.blank_spectrum is None:
                raise MissingBlank("no blank spectrum stored")
            spectrum = _calibrated_capture(body.image_id, body.smooth)
            measurement = measure_absorption(session.blank_spectrum, spectrum)
            session.measurement = MeasurementRecord.from_measurement(
                measurement, image_id=body.image_id)
            revision = state.commit()
            out = _measurement_json(measurement)
            out["image_id"] = body.image_id
            out["revision"] = revision
            return out

    # -- samples and fitting --

    @app.post("/api/samples")
    async def add_sample(body: SampleBody, request: Request):
        async with state.lock:
            check_if_match(request)
            session = state.session
            if session.measurement is None:
                raise MissingMeasurement("no measurement; measure first")
            if body.wavelength == "auto":
                wavelength = lambda_max(session.measurement)
            else:
                wavelength = float(body.wavelength)
            absorbance = absorbance_at(session.measurement, wavelength)
            record = SampleRecord(
                concentration=body.concentration,
                absorbance=absorbance,
                label=body.label,
                image_id=session.measurement.image_id,
                wavelength_nm=wavelength,
            )
            session.samples.append(record)
            session.fit = None
            revision = state.commit()
            return {"samples": _samples_json(session), "revision": revision}

    @app.delete("/api/samples/{index}")
    async def delete_sample(index: int, request: Request):
        async with state.lock:
            check_if_match(request)
            session = state.session
            if not 0 <= index < len(session.samples):
                raise StarletteHTTPException(
                    status_code=404, detail=f"no sample at index {index}")
            del session.samples[index]
            session.fit = None
            revision = state.commit()
            return {"samples": _samples_json(session), "revision": revision}

    @app.post("/api/fit")
    async def fit(body: FitBody, request: Request):
        async with state.lock:
            check_if_match(request)
            session = state.session
            result = fit_beer_lambert(
                [s.as_calibration_sample() for s in session.samples],
                mode=body.mode,
                analysis_wavelength_nm=shared_analysis_wavelength(session.samples),
            )
            session.fit = result
            revision = state.commit()
            out = _fit_json(result)
            out["revision"] = revision
            return out

    @app.post("/api/predict")
    async def predict(body: PredictBody):
        async with state.lock:
            session = state.session
            if (body.absorbance is None) == (body.image_id is None):
                raise _BadRequest(
                    "provide exactly one of 'absorbance' and 'image_id'")
            if session.fit is None:
                raise MissingFit("no calibration line; fit first")
            if body.absorbance is not None:
                absorbance = body.absorbance
            else:
                if session.blank_spectrum is None:
                    raise MissingBlank("no blank spectrum stored")
                spectrum = _calibrated_capture(body.image_id, body.smooth)
                measurement = measure_absorption(session.blank_spectrum, spectrum)
                wavelength = session.fit.analysis_wavelength_nm
                if wavelength is None:
                    wavelength = lambda_max(measurement)
                absorbance = absorbance_at(measurement, wavelength)
            prediction = predict_concentration(session.fit, absorbance)
            return {
                "concentration": _float_cell(prediction.concentration),
                "below_range": prediction.below_range,
                "absorbance": _float_cell(absorbance),
                "revision": state.revision,
            }

    # -- exports --

    @app.get("/api/export/{artifact}")
    async def export_artifact(artifact: str):
        async with state.lock:
            session = state.session
            if artifact == "raw.csv":
                if session.raw_spectrum is None:
                    raise MissingSpectrum("no extracted spectrum in session")
                text, media = write_raw_spectrum_csv(session.raw_spectrum), "text/csv"
            elif artifact == "blank.csv":
                if session.blank_spectrum is None:
                    raise MissingBlank("no blank spectrum in session")
                text, media = write_spectrum_csv(session.blank_spectrum), "text/csv"
            elif artifact == "measurement.csv":
                if session.measurement is None:
                    raise MissingMeasurement("no measurement in session")
                text, media = write_measurement_csv(session.measurement), "text/csv"
            elif artifact == "fit.txt":
                if session.fit is None:
                    raise MissingFit("no calibration line; run fit first")
                text, media = format_fit_record(session.fit), "text/plain"
            elif artifact == "spectrum.svg":
                if session.raw_spectrum is None:
                    raise MissingSpectrum("no extracted spectrum in session")
                if session.wavelength_cal is not None:
                    text = plot_spectrum_svg(apply_calibration(
                        session.raw_spectrum, session.wavelength_cal))
                else:
                    text = plot_raw_spectrum_svg(session.raw_spectrum)
                media = "image/svg+xml"
            elif artifact == "measurement.svg":
                if session.measurement is None:
                    raise MissingMeasurement("no measurement in session")
                text, media = plot_measurement_svg(session.measurement), "image/svg+xml"
            elif artifact == "calibration.svg":
                if not session.samples:
                    raise TooFewSamples("no samples in session")
                if session.fit is None:
                    raise MissingFit("no calibration line; run fit first")
                text = plot_calibration_svg(session.samples, session.fit)
                media = "image/svg+xml"
            else:
                raise StarletteHTTPException(404, f"no export named {artifact!r}")
        headers = {"Content-Disposition": f'attachment; filename="{artifact}"'}
        return Response(content=text, media_type=media, headers=headers)

    # -- whole-session --

    @app.get("/api/session")
    async def get_session():
        async with state.lock:
            text = canonical_session_json(state.session)
            return Response(content=text, media_type="application/json",
                            headers={"ETag": f'"{state.revision}"'})

    @app.put("/api/session")
    async def put_session(request: Request):
        async with state.lock:
            check_if_match(request)
            data = await request.body()
            try:
                text = data.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise _BadRequest(f"body is not UTF-8: {exc}") from exc
            state.session = parse_session(text)
            revision = state.commit()
            return {"revision": revision}

    # -- static UI --

    directory = Path(ui_dir) if ui_dir is not None else _default_ui_dir()
    if directory is not None and Path(directory).is_dir():
        app.mount("/", StaticFiles(directory=directory, html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        async def placeholder():
            return ("<!doctype html><title>photospec</title>"
                    "<p>The bench UI is not built. The API lives under "
                    "<code>/api</code>.</p>")

    return app


def run_server(addr=None, session_path=None) -> None:
    import uvicorn

    if addr is None:
        addr = os.environ.get("SPECTRA_ADDR", DEFAULT_ADDR)
    host, _, port_text = addr.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValueError(f"bind address must be HOST:PORT, got {addr!r}")
    app = create_app(session_path=session_path)
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
