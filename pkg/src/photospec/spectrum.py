"""Cross-section extraction: image band -> per-column RGB intensity arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryOutOfBounds, WindowEven, WindowTooLarge
from .image import RasterImage

ORIENTATIONS = ("left-to-right", "right-to-left")


@dataclass(frozen=True)
class ExtractionGeometry:
    """Horizontal row band and column range to average into a spectrum.

    ``orientation`` states which image side holds the short-wavelength end;
    for "right-to-left" the extracted arrays are reversed so index 0 is
    always the short-wavelength end.
    """

    row: int
    band_half_width: int
    col_start: int
    col_end: int
    orientation: str = "left-to-right"

    def __post_init__(self):
        if self.band_half_width < 0:
            raise ValueError("band_half_width must be >= 0")
        if not (0 <= self.col_start < self.col_end):
            raise ValueError("need 0 <= col_start < col_end")
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")

    def check_bounds(self, image: RasterImage) -> None:
        if self.row - self.band_half_width < 0 or self.row + self.band_half_width >= image.height:
            raise GeometryOutOfBounds(
                f"band rows [{self.row - self.band_half_width}, "
                f"{self.row + self.band_half_width}] outside image height {image.height}"
            )
        if self.col_end >= image.width:
            raise GeometryOutOfBounds(
                f"col_end {self.col_end} outside image width {image.width}"
            )

    @property
    def n_columns(self) -> int:
        return self.col_end - self.col_start + 1


@dataclass(frozen=True)
class RawSpectrum:
    """Normalized per-column intensities for R, G, B plus their mean."""

    r: np.ndarray
    g: np.ndarray
    b: np.ndarray
    combined: np.ndarray
    source_geometry: ExtractionGeometry

    def __post_init__(self):
        arrays = {}
        for name in ("r", "g", "b", "combined"):
            a = np.asarray(getattr(self, name), dtype=np.float64)
            arrays[name] = a
        n = arrays["r"].shape[0] if arrays["r"].ndim == 1 else -1
        for name, a in arrays.items():
            if a.ndim != 1 or a.shape[0] != n:
                raise ValueError("r, g, b, combined must be 1-D arrays of equal length")
            if a.shape[0] < 2:
                raise ValueError("spectrum needs at least 2 points")
            if a.min() < 0.0 or a.max() > 1.0:
                raise ValueError(f"{name} intensities must lie in [0, 1]")
            object.__setattr__(self, name, a)
        expected = (arrays["r"] + arrays["g"] + arrays["b"]) / 3.0
        if not np.array_equal(arrays["combined"], expected):
            raise ValueError("combined channel must equal (r + g + b) / 3")
        if n != self.source_geometry.n_columns:
            raise ValueError(
                f"{n} points do not match the {self.source_geometry.n_columns}"
                " columns of the source geometry"
            )

    @property
    def n(self) -> int:
        return self.r.shape[0]

    def pixel_axis(self) -> np.ndarray:
        """Pixel positions of the points along the spectral direction."""
        g = self.source_geometry
        return np.arange(g.col_start, g.col_start + self.n, dtype=np.float64)

    def __eq__(self, other):
        if not isinstance(other, RawSpectrum):
            return NotImplemented
        return self.source_geometry == other.source_geometry and all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("r", "g", "b", "combined")
        )


def extract_raw_spectrum(image: RasterImage, geometry: ExtractionGeometry) -> RawSpectrum:
    """Average the band rows per column and normalize by full scale (255).

    Integer images are summed in int64 so the per-column means are exact
    rationals, independent of row order inside the band.
    """
    geometry.check_bounds(image)
    lo = geometry.row - geometry.band_half_width
    hi = geometry.row + geometry.band_half_width + 1
    band = image.pixels[lo:hi, geometry.col_start:geometry.col_end + 1, :]
    rows = hi - lo
    if band.dtype == np.uint8:
        sums = band.sum(axis=0, dtype=np.int64)
    else:
        sums = band.sum(axis=0, dtype=np.float64)
    channels = sums / (255.0 * rows)
    r, g, b = channels[:, 0], channels[:, 1], channels[:, 2]
    if geometry.orientation == "right-to-left":
        r, g, b = r[::-1], g[::-1], b[::-1]
    combined = (r + g + b) / 3.0
    return RawSpectrum(r=r, g=g, b=b, combined=combined, source_geometry=geometry)


def _moving_average(values: np.ndarray, half: int) -> np.ndarray:
    """Centered moving average with truncated windows at the edges.

    Each window mean is computed as center + mean(window - center), which
    keeps constant inputs bit-exactly unchanged.
    """
    n = values.shape[0]
    out = np.empty(n)
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        center = values[i]
        out[i] = center + np.mean(values[lo:hi] - center)
    # the shifted mean can overshoot [0, 1] by rounding dust
    return np.clip(out, 0.0, 1.0)


def smooth(spectrum: RawSpectrum, window: int) -> RawSpectrum:
    """Moving-average smoothing per channel; the combined channel is rebuilt
    from the smoothed R, G, B so it stays their exact mean."""
    if window % 2 == 0:
        raise WindowEven(f"smoothing window must be odd, got {window}")
    if window < 1:
        raise WindowEven(f"smoothing window must be >= 1, got {window}")
    if window > spectrum.n:
        raise WindowTooLarge(
            f"smoothing window {window} exceeds spectrum length {spectrum.n}"
        )
    if window == 1:
        return spectrum
    half = window // 2
    r = _moving_average(spectrum.r, half)
    g = _moving_average(spectrum.g, half)
    b = _moving_average(spectrum.b, half)
    combined = (r + g + b) / 3.0
    return RawSpectrum(r=r, g=g, b=b, combined=combined,
                       source_geometry=spectrum.source_geometry)
