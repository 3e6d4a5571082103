"""Deterministic SVG charts for spectra, measurements and calibration lines.

Every function maps the same data to the same bytes: fixed canvas, a plain
affine data-to-canvas transform with no padding heuristics, and fixed-point
coordinate formatting. That keeps plots diffable and lets tests recompute
vertex positions independently.
"""

from __future__ import annotations

import math

import numpy as np

from .beer_lambert import BeerLambertFit

CANVAS_WIDTH = 800
CANVAS_HEIGHT = 500
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 20
MARGIN_BOTTOM = 50

PLOT_WIDTH = CANVAS_WIDTH - MARGIN_LEFT - MARGIN_RIGHT
PLOT_HEIGHT = CANVAS_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

N_TICKS = 5

CHANNEL_COLORS = (("r", "#cc2222"), ("g", "#22aa22"),
                  ("b", "#2222cc"), ("combined", "#000000"))


def data_range(values) -> tuple:
    """[min, max] of the finite values; widened by 0.5 each way if flat."""
    finite = [float(v) for v in values if math.isfinite(float(v))]
    if not finite:
        raise ValueError("no finite values to plot")
    lo, hi = min(finite), max(finite)
    if lo == hi:
        return lo - 0.5, hi + 0.5
    return lo, hi


def x_to_canvas(x: float, lo: float, hi: float) -> float:
    return MARGIN_LEFT + (x - lo) * PLOT_WIDTH / (hi - lo)


def y_to_canvas(y: float, lo: float, hi: float) -> float:
    return MARGIN_TOP + (hi - y) * PLOT_HEIGHT / (hi - lo)


def _coord(v: float) -> str:
    return format(v, ".6f")


def _polyline(points, color: str) -> str:
    joined = " ".join(f"{_coord(x)},{_coord(y)}" for x, y in points)
    return (f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{joined}"/>')


def _tick_label(v: float) -> str:
    return format(v, ".6g")


def _axes(x_lo, x_hi, y_lo, y_hi, x_label, y_label):
    parts = []
    ax_bottom = MARGIN_TOP + PLOT_HEIGHT
    ax_right = MARGIN_LEFT + PLOT_WIDTH
    parts.append(f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{PLOT_WIDTH}" '
                 f'height="{PLOT_HEIGHT}" fill="none" stroke="#444444"/>')
    for i in range(N_TICKS):
        frac = i / (N_TICKS - 1)
        xv = x_lo + frac * (x_hi - x_lo)
        cx = x_to_canvas(xv, x_lo, x_hi)
        parts.append(f'<line x1="{_coord(cx)}" y1="{ax_bottom}" '
                     f'x2="{_coord(cx)}" y2="{ax_bottom + 5}" stroke="#444444"/>')
        parts.append(f'<text x="{_coord(cx)}" y="{ax_bottom + 18}" '
                     f'font-size="11" text-anchor="middle">{_tick_label(xv)}</text>')
        yv = y_lo + frac * (y_hi - y_lo)
        cy = y_to_canvas(yv, y_lo, y_hi)
        parts.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{_coord(cy)}" '
                     f'x2="{MARGIN_LEFT}" y2="{_coord(cy)}" stroke="#444444"/>')
        parts.append(f'<text x="{MARGIN_LEFT - 8}" y="{_coord(cy)}" font-size="11" '
                     f'text-anchor="end" dominant-baseline="middle">'
                     f'{_tick_label(yv)}</text>')
    parts.append(f'<text x="{MARGIN_LEFT + PLOT_WIDTH / 2:.1f}" '
                 f'y="{CANVAS_HEIGHT - 8}" font-size="13" '
                 f'text-anchor="middle">{x_label}</text>')
    parts.append(f'<text x="14" y="{MARGIN_TOP + PLOT_HEIGHT / 2:.1f}" '
                 f'font-size="13" text-anchor="middle" '
                 f'transform="rotate(-90 14 {MARGIN_TOP + PLOT_HEIGHT / 2:.1f})">'
                 f'{y_label}</text>')
    return parts


def _document(parts) -> str:
    body = "\n".join(parts)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS_WIDTH}" '
            f'height="{CANVAS_HEIGHT}" viewBox="0 0 {CANVAS_WIDTH} '
            f'{CANVAS_HEIGHT}">\n'
            f'<rect width="{CANVAS_WIDTH}" height="{CANVAS_HEIGHT}" '
            f'fill="#ffffff"/>\n'
            f"{body}\n</svg>\n")


def _channels_document(x, spectrum, x_label: str) -> str:
    x_lo, x_hi = data_range(x)
    y_lo, y_hi = data_range(np.concatenate(
        [spectrum.r, spectrum.g, spectrum.b, spectrum.combined]))
    parts = _axes(x_lo, x_hi, y_lo, y_hi, x_label, "intensity")
    for name, color in CHANNEL_COLORS:
        values = getattr(spectrum, name)
        points = [(x_to_canvas(float(x[i]), x_lo, x_hi),
                   y_to_canvas(float(values[i]), y_lo, y_hi))
                  for i in range(len(x))]
        parts.append(_polyline(points, color))
    return _document(parts)


def plot_spectrum_svg(spectrum) -> str:
    """Channel intensities against wavelength, one polyline per channel."""
    return _channels_document(spectrum.wavelengths, spectrum, "wavelength / nm")


def plot_raw_spectrum_svg(spectrum) -> str:
    """Channel intensities against pixel column (no calibration applied)."""
    return _channels_document(spectrum.pixel_axis(), spectrum, "pixel")


def plot_measurement_svg(measurement) -> str:
    """Absorbance against wavelength; non-finite points break the line."""
    w = measurement.wavelengths
    a = measurement.absorbance
    x_lo, x_hi = data_range(w)
    y_lo, y_hi = data_range(a)
    parts = _axes(x_lo, x_hi, y_lo, y_hi, "wavelength / nm", "absorbance")
    segment = []
    segments = []
    for i in range(len(w)):
        if math.isfinite(float(a[i])):
            segment.append((x_to_canvas(float(w[i]), x_lo, x_hi),
                            y_to_canvas(float(a[i]), y_lo, y_hi)))
        elif segment:
            segments.append(segment)
            segment = []
    if segment:
        segments.append(segment)
    for seg in segments:
        if len(seg) >= 2:
            parts.append(_polyline(seg, "#000000"))
        else:
            parts.append(f'<circle cx="{_coord(seg[0][0])}" '
                         f'cy="{_coord(seg[0][1])}" r="1.5" fill="#000000"/>')
    return _document(parts)


def plot_calibration_svg(samples, fit: BeerLambertFit) -> str:
    """Sample points, the fitted line and an r^2 caption."""
    concentrations = [s.concentration for s in samples]
    absorbances = [s.absorbance for s in samples]
    c_hi = max(concentrations)
    line_y = (fit.absorbance_for(0.0), fit.absorbance_for(c_hi))
    x_lo, x_hi = 0.0, c_hi
    y_lo, y_hi = data_range(list(absorbances) + list(line_y))
    parts = _axes(x_lo, x_hi, y_lo, y_hi, "concentration", "absorbance")
    parts.append(_polyline(
        [(x_to_canvas(0.0, x_lo, x_hi), y_to_canvas(line_y[0], y_lo, y_hi)),
         (x_to_canvas(c_hi, x_lo, x_hi), y_to_canvas(line_y[1], y_lo, y_hi))],
        "#cc2222"))
    for c, a in zip(concentrations, absorbances):
        parts.append(f'<circle cx="{_coord(x_to_canvas(c, x_lo, x_hi))}" '
                     f'cy="{_coord(y_to_canvas(a, y_lo, y_hi))}" r="4" '
                     f'fill="#2222cc"/>')
    caption = (f"r^2 = {format(fit.r_squared, '.6g')}, "
               f"slope = {format(fit.slope, '.6g')}, "
               f"intercept = {format(fit.intercept, '.6g')} ({fit.mode})")
    parts.append(f'<text x="{MARGIN_LEFT + 10}" y="{MARGIN_TOP + 18}" '
                 f'font-size="13">{caption}</text>')
    return _document(parts)
