"""Command line workflow: photograph in, spectra, absorbances and fits out.

Exit codes: 0 success, 1 usage error, 2 data or validation error, 3 I/O
error. Results go to stdout as CSV or key=value records; diagnostics go to
stderr. Stateful subcommands share a session file so a scripted run and the
web bench produce the same artifacts.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .absorption import absorbance_at, lambda_max, measure_absorption
from .beer_lambert import (
    MODE_WITH_INTERCEPT,
    MODES,
    fit_beer_lambert,
    predict_concentration,
)
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
)
from .export import (
    format_fit_record,
    format_number,
    write_measurement_csv,
    write_raw_spectrum_csv,
    write_series_csv,
    write_spectrum_csv,
)
from .image import auto_orient, decode_image, encode_png, rotate
from .session import (
    MeasurementRecord,
    SampleRecord,
    content_fingerprint,
    load_session,
    new_session,
    now_iso,
    register_image,
    save_session,
    shared_analysis_wavelength,
)
from .spectrum import ORIENTATIONS, ExtractionGeometry, extract_raw_spectrum, smooth
from .svgplot import (
    plot_calibration_svg,
    plot_measurement_svg,
    plot_raw_spectrum_svg,
    plot_spectrum_svg,
)
from .wavelength import apply_calibration, make_wavelength_calibration


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _write_bytes(path, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _load_image(path):
    """Returns (raw bytes, decoded image); format sniffed from the bytes."""
    data = _read_bytes(path)
    fmt = "jpeg" if data[:2] == b"\xff\xd8" else "png"
    return data, decode_image(data, fmt)


def _run_with_session(args, fn, create: bool = True) -> int:
    """Load (or create) the session, run fn, save only if content changed.

    Leaving the modified timestamp alone on a no-op keeps re-runs
    byte-identical.
    """
    path = args.session
    existed = os.path.exists(path)
    if not existed and not create:
        raise IoFailure(f"no session file at {path}")
    session = load_session(path) if existed else new_session()
    before = content_fingerprint(session)
    output = fn(session)
    if content_fingerprint(session) != before:
        session.modified = now_iso()
        save_session(session, path)
    elif not existed:
        save_session(session, path)
    if output:
        sys.stdout.write(output)
    return 0


# --- subcommand handlers ----------------------------------------------------


def cmd_extract(args) -> int:
    def run(session):
        data, image = _load_image(args.image)
        if args.auto_orient:
            image = rotate(image, auto_orient(image))
        col_start, col_end = args.cols
        geometry = ExtractionGeometry(
            row=args.row,
            band_half_width=args.band,
            col_start=col_start,
            col_end=col_end,
            orientation=args.orientation,
        )
        raw = smooth(extract_raw_spectrum(image, geometry), args.smooth)
        image_id = register_image(session, Path(args.image).name, data)
        session.geometry = geometry
        session.raw_spectrum = raw
        session.raw_image_id = image_id
        return write_raw_spectrum_csv(raw)

    return _run_with_session(args, run)


def cmd_calibrate(args) -> int:
    if len(args.anchor) != 2:
        raise _UsageError("exactly two --anchor PIXEL:NM pairs are required")

    def run(session):
        cal = make_wavelength_calibration(args.anchor[0], args.anchor[1])
        session.wavelength_cal = cal
        return (
            f"p1={format_number(cal.p1)}\n"
            f"lambda1={format_number(cal.lambda1)}\n"
            f"p2={format_number(cal.p2)}\n"
            f"lambda2={format_number(cal.lambda2)}\n"
            f"slope_nm_per_px={format_number(cal.slope)}\n"
            f"intercept_nm={format_number(cal.intercept)}\n"
        )

    return _run_with_session(args, run)


def _calibrated_capture(session, image_path, window):
    """Extract with the session geometry and map onto wavelengths."""
    if session.geometry is None:
        raise MissingGeometry("no extraction geometry; run extract first")
    if session.wavelength_cal is None:
        raise MissingCalibration("no wavelength calibration; run calibrate first")
    data, image = _load_image(image_path)
    raw = smooth(extract_raw_spectrum(image, session.geometry), window)
    return data, apply_calibration(raw, session.wavelength_cal)


def cmd_blank(args) -> int:
    def run(session):
        data, spectrum = _calibrated_capture(session, args.image, args.smooth)
        register_image(session, Path(args.image).name, data)
        session.blank_spectrum = spectrum
        return write_spectrum_csv(spectrum)

    return _run_with_session(args, run)


def cmd_measure(args) -> int:
    def run(session):
        if session.blank_spectrum is None:
            raise MissingBlank("no blank spectrum; run blank first")
        data, spectrum = _calibrated_capture(session, args.image, args.smooth)
        measurement = measure_absorption(session.blank_spectrum, spectrum)
        image_id = register_image(session, Path(args.image).name, data)
        session.measurement = MeasurementRecord.from_measurement(
            measurement, image_id=image_id)
        return write_measurement_csv(measurement)

    return _run_with_session(args, run)


def cmd_add_sample(args) -> int:
    def run(session):
        if session.measurement is None:
            raise MissingMeasurement("no measurement; run measure first")
        measurement = session.measurement
        if args.at is not None:
            wavelength = args.at
        else:
            wavelength = lambda_max(measurement)
        absorbance = absorbance_at(measurement, wavelength)
        record = SampleRecord(
            concentration=args.concentration,
            absorbance=absorbance,
            label=args.label,
            image_id=measurement.image_id,
            wavelength_nm=wavelength,
        )
        session.samples.append(record)
        session.fit = None  # any stored fit is stale once samples change
        return (
            f"index={len(session.samples) - 1}\n"
            f"concentration={format_number(record.concentration)}\n"
            f"absorbance={format_number(record.absorbance)}\n"
            f"wavelength_nm={format_number(record.wavelength_nm)}\n"
        )

    return _run_with_session(args, run)


def cmd_fit(args) -> int:
    def run(session):
        fit = fit_beer_lambert(
            [s.as_calibration_sample() for s in session.samples],
            mode=args.mode,
            analysis_wavelength_nm=shared_analysis_wavelength(session.samples),
        )
        session.fit = fit
        return format_fit_record(fit)

    return _run_with_session(args, run)


def cmd_predict(args) -> int:
    def run(session):
        if session.fit is None:
            raise MissingFit("no calibration line; run fit first")
        if args.absorbance is not None:
            absorbance = args.absorbance
        else:
            if session.blank_spectrum is None:
                raise MissingBlank("no blank spectrum; run blank first")
            _, spectrum = _calibrated_capture(session, args.image, args.smooth)
            measurement = measure_absorption(session.blank_spectrum, spectrum)
            wavelength = session.fit.analysis_wavelength_nm
            if wavelength is None:
                wavelength = lambda_max(measurement)
            absorbance = absorbance_at(measurement, wavelength)
        prediction = predict_concentration(session.fit, absorbance)
        return (
            f"concentration={format_number(prediction.concentration)}\n"
            f"below_range={'true' if prediction.below_range else 'false'}\n"
            f"absorbance={format_number(absorbance)}\n"
        )

    return _run_with_session(args, run, create=False)


def cmd_plot(args) -> int:
    def run(session):
        if args.what == "spectrum":
            if session.raw_spectrum is None:
                raise MissingSpectrum("no extracted spectrum in session")
            if session.wavelength_cal is not None:
                svg = plot_spectrum_svg(
                    apply_calibration(session.raw_spectrum, session.wavelength_cal))
            else:
                svg = plot_raw_spectrum_svg(session.raw_spectrum)
        elif args.what == "measurement":
            if session.measurement is None:
                raise MissingMeasurement("no measurement in session")
            svg = plot_measurement_svg(session.measurement)
        else:  # calibration-line
            if not session.samples:
                raise TooFewSamples("no samples in session")
            if session.fit is None:
                raise MissingFit("no calibration line; run fit first")
            svg = plot_calibration_svg(session.samples, session.fit)
        _write_text(args.out, svg)
        return f"{args.out}\n"

    return _run_with_session(args, run, create=False)


def _render_config(args):
    from .synth import RenderConfig

    return RenderConfig(
        width=args.width,
        height=args.height,
        lambda_min=args.lambda_min,
        lambda_max=args.lambda_max,
        band_top=args.band_top,
        band_bottom=args.band_bottom,
        quantize=True,
        noise_sigma=args.noise_sigma,
        rng_seed=args.seed,
    )


def cmd_synth_render_blank(args) -> int:
    from .synth import render_blank
    from .synth.series import DEFAULT_LAMP

    image = render_blank(DEFAULT_LAMP, _render_config(args))
    _write_bytes(args.out, encode_png(image))
    sys.stdout.write(f"{args.out}\n")
    return 0


def cmd_synth_render_sample(args) -> int:
    from .synth import render_sample
    from .synth.series import DEFAULT_DYE, DEFAULT_LAMP

    image = render_sample(DEFAULT_LAMP, DEFAULT_DYE, args.concentration,
                          _render_config(args))
    _write_bytes(args.out, encode_png(image))
    sys.stdout.write(f"{args.out}\n")
    return 0


def cmd_synth_paper_series(args) -> int:
    from .synth import run_paper_series

    report = run_paper_series(mode=args.mode, emit_dir=args.emit_images)
    if args.report_dir is not None:
        from .report import render_series_report

        for path in render_series_report(report, args.report_dir):
            sys.stderr.write(f"wrote {path}\n")
    sys.stdout.write(write_series_csv(report))
    return 0


def cmd_serve(args) -> int:
    from .service import run_server

    run_server(addr=args.addr, session_path=args.session)
    return 0


# --- parser -----------------------------------------------------------------


def _anchor_pair(text: str):
    pixel, _, nm = text.partition(":")
    return float(pixel), float(nm)


def _column_range(text: str):
    start, _, end = text.partition(":")
    return int(start), int(end)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="photospec",
        description="Spectrophotometry from photographs: extract spectra, "
                    "calibrate wavelengths, measure absorbance, fit and "
                    "predict concentrations.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("extract", help="average an image band into a spectrum")
    p.add_argument("--image", required=True, help="PNG or JPEG photograph")
    p.add_argument("--row", required=True, type=int, help="center row of the band")
    p.add_argument("--band", required=True, type=int,
                   help="half width: rows row-band .. row+band are averaged")
    p.add_argument("--cols", required=True, type=_column_range, metavar="START:END",
                   help="inclusive column range along the spectral axis")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--orientation", choices=ORIENTATIONS,
                       default="left-to-right",
                       help="which side holds the short-wavelength end")
    group.add_argument("--auto-orient", action="store_true",
                       help="rotate so the spectral axis runs horizontally")
    p.add_argument("--smooth", type=int, default=1, metavar="WINDOW",
                   help="odd moving-average window (1 = off)")
    p.add_argument("--session", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("calibrate", help="two-point pixel-to-wavelength mapping")
    p.add_argument("--anchor", action="append", default=[], type=_anchor_pair,
                   metavar="PIXEL:NM", help="known line position (give twice)")
    p.add_argument("--session", required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("blank", help="store the reference (no sample) spectrum")
    p.add_argument("--image", required=True)
    p.add_argument("--smooth", type=int, default=1, metavar="WINDOW")
    p.add_argument("--session", required=True)
    p.set_defaults(func=cmd_blank)

    p = sub.add_parser("measure", help="transmittance/absorbance against the blank")
    p.add_argument("--image", required=True)
    p.add_argument("--smooth", type=int, default=1, metavar="WINDOW")
    p.add_argument("--session", required=True)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("add-sample",
                       help="record a known concentration from the measurement")
    p.add_argument("--concentration", required=True, type=float)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--at", type=float, metavar="NM",
                       help="read absorbance at this wavelength")
    group.add_argument("--auto-lambda-max", action="store_true",
                       help="read at the absorbance maximum (default)")
    p.add_argument("--label", default="")
    p.add_argument("--session", required=True)
    p.set_defaults(func=cmd_add_sample)

    p = sub.add_parser("fit", help="fit absorbance against concentration")
    p.add_argument("--mode", choices=MODES, default=MODE_WITH_INTERCEPT)
    p.add_argument("--session", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="invert the fitted line for an unknown")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--absorbance", type=float)
    group.add_argument("--image", help="measure this photograph and predict")
    p.add_argument("--smooth", type=int, default=1, metavar="WINDOW")
    p.add_argument("--session", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("plot", help="render a session object as SVG")
    p.add_argument("--what", required=True,
                   choices=("spectrum", "measurement", "calibration-line"))
    p.add_argument("--out", required=True, help="output SVG path")
    p.add_argument("--session", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("synth", help="render synthetic benchmark images")
    synth_sub = p.add_subparsers(dest="synth_command", required=True,
                                 metavar="SUBCOMMAND")

    def add_render_flags(sp):
        sp.add_argument("--out", required=True, help="output PNG path")
        sp.add_argument("--width", type=int, default=720)
        sp.add_argument("--height", type=int, default=60)
        sp.add_argument("--lambda-min", type=float, default=380.0)
        sp.add_argument("--lambda-max", type=float, default=740.0)
        sp.add_argument("--band-top", type=int, default=20)
        sp.add_argument("--band-bottom", type=int, default=39)
        sp.add_argument("--noise-sigma", type=float, default=0.0)
        sp.add_argument("--seed", type=int, default=0)

    sp = synth_sub.add_parser("render-blank", help="lamp only")
    add_render_flags(sp)
    sp.set_defaults(func=cmd_synth_render_blank)

    sp = synth_sub.add_parser("render-sample", help="lamp through the dye")
    sp.add_argument("--concentration", required=True, type=float)
    add_render_flags(sp)
    sp.set_defaults(func=cmd_synth_render_sample)

    sp = synth_sub.add_parser("paper-series",
                              help="dilution ladder with leave-one-out errors")
    sp.add_argument("--mode", choices=MODES, default="through-origin")
    sp.add_argument("--emit-images", metavar="DIR",
                    help="also write the rendered PNGs here")
    sp.add_argument("--report-dir", metavar="DIR",
                    help="write series.csv and report figures here")
    sp.set_defaults(func=cmd_synth_paper_series)

    p = sub.add_parser("serve", help="run the HTTP bench service")
    p.add_argument("--addr", default=None, metavar="HOST:PORT",
                   help="bind address (default: SPECTRA_ADDR or 127.0.0.1:8300)")
    p.add_argument("--session", default=None,
                   help="session file to load and persist (in-memory if omitted)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        sys.stderr.write(f"photospec: error: {exc}\n")
        return 1
    except IoFailure as exc:
        sys.stderr.write(f"photospec: {exc.code}: {exc}\n")
        return 3
    except SpectraError as exc:
        sys.stderr.write(f"photospec: {exc.code}: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"photospec: invalid value: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"photospec: i/o error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
