"""Delimited text renderings of spectra, measurements, fits and series runs.

All numbers are written with 17 significant digits, enough to reconstruct
the exact double, so exports are both deterministic and lossless.
"""

from __future__ import annotations

import math

from .absorption import AbsorptionMeasurement
from .beer_lambert import BeerLambertFit
from .spectrum import RawSpectrum
from .wavelength import CalibratedSpectrum

SPECTRUM_HEADER = "wavelength_nm,r,g,b,combined"
RAW_SPECTRUM_HEADER = "pixel,r,g,b,combined"
MEASUREMENT_HEADER = "wavelength_nm,transmittance,absorbance,flag"
SERIES_HEADER = "concentration,predicted,relative_error"

FIT_RECORD_KEYS = ("slope", "intercept", "r_squared", "n_samples",
                   "analysis_wavelength_nm", "mode")


def format_number(x) -> str:
    """17 significant digits; 'nan', 'inf' and '-inf' pass through."""
    x = float(x)
    if not math.isfinite(x):
        return repr(x)  # 'nan' / 'inf' / '-inf'
    return format(x, "#.17g")


def write_raw_spectrum_csv(spectrum: RawSpectrum) -> str:
    lines = [RAW_SPECTRUM_HEADER]
    pixels = spectrum.pixel_axis()
    for i in range(spectrum.n):
        lines.append(",".join((
            str(int(pixels[i])),
            format_number(spectrum.r[i]),
            format_number(spectrum.g[i]),
            format_number(spectrum.b[i]),
            format_number(spectrum.combined[i]),
        )))
    return "\n".join(lines) + "\n"


def write_spectrum_csv(spectrum: CalibratedSpectrum) -> str:
    lines = [SPECTRUM_HEADER]
    for i in range(spectrum.n):
        lines.append(",".join((
            format_number(spectrum.wavelengths[i]),
            format_number(spectrum.r[i]),
            format_number(spectrum.g[i]),
            format_number(spectrum.b[i]),
            format_number(spectrum.combined[i]),
        )))
    return "\n".join(lines) + "\n"


def write_measurement_csv(measurement: AbsorptionMeasurement) -> str:
    lines = [MEASUREMENT_HEADER]
    for i in range(measurement.n):
        lines.append(",".join((
            format_number(measurement.wavelengths[i]),
            format_number(measurement.transmittance[i]),
            format_number(measurement.absorbance[i]),
            measurement.flags[i],
        )))
    return "\n".join(lines) + "\n"


def format_fit_record(fit: BeerLambertFit) -> str:
    """Flat key=value lines, one per field, fixed key order."""
    values = {
        "slope": format_number(fit.slope),
        "intercept": format_number(fit.intercept),
        "r_squared": format_number(fit.r_squared),
        "n_samples": str(fit.n_samples),
        "analysis_wavelength_nm": (
            "" if fit.analysis_wavelength_nm is None
            else format_number(fit.analysis_wavelength_nm)
        ),
        "mode": fit.mode,
    }
    return "".join(f"{key}={values[key]}\n" for key in FIT_RECORD_KEYS)


def write_series_csv(report) -> str:
    """Series rows, a blank separator line, then the full-fit record."""
    lines = [SERIES_HEADER]
    for row in report.rows:
        lines.append(",".join((
            format_number(row.concentration),
            format_number(row.predicted),
            format_number(row.relative_error),
        )))
    return "\n".join(lines) + "\n\n" + format_fit_record(report.fit)
