"""Two-anchor linear pixel-to-wavelength calibration and resampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoincidentAnchors, GridOutOfRange
from .spectrum import RawSpectrum


@dataclass(frozen=True)
class WavelengthCalibration:
    """Linear map fixed by two (pixel, nm) anchors.

    Evaluation uses the barycentric form
        lambda(p) = l1 * (p2 - p) / (p2 - p1) + l2 * (p - p1) / (p2 - p1)
    so both anchors reproduce exactly, not merely to round-off.
    """

    p1: float
    lambda1: float
    p2: float
    lambda2: float

    def __post_init__(self):
        if self.p1 == self.p2:
            raise CoincidentAnchors(f"anchor pixels coincide at {self.p1}")
        if self.lambda1 == self.lambda2:
            raise CoincidentAnchors(f"anchor wavelengths coincide at {self.lambda1}")

    @property
    def slope(self) -> float:
        """Dispersion in nm per pixel."""
        return (self.lambda2 - self.lambda1) / (self.p2 - self.p1)

    @property
    def intercept(self) -> float:
        """Wavelength the line assigns to pixel 0."""
        return self.lambda1 - self.slope * self.p1

    def map(self, pixel):
        """Wavelength at a pixel position (scalar or array)."""
        p = np.asarray(pixel, dtype=np.float64)
        span = self.p2 - self.p1
        lam = (self.lambda1 * (self.p2 - p) + self.lambda2 * (p - self.p1)) / span
        return float(lam) if np.ndim(pixel) == 0 else lam


def make_wavelength_calibration(anchor1, anchor2) -> WavelengthCalibration:
    """Build the calibration from two (pixel, wavelength_nm) pairs."""
    (p1, l1), (p2, l2) = anchor1, anchor2
    return WavelengthCalibration(p1=float(p1), lambda1=float(l1),
                                 p2=float(p2), lambda2=float(l2))


@dataclass(frozen=True)
class CalibratedSpectrum:
    """Wavelength-indexed intensities, per channel plus combined."""

    wavelengths: np.ndarray
    r: np.ndarray
    g: np.ndarray
    b: np.ndarray
    combined: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.wavelengths, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] < 1:
            raise ValueError("need a 1-D grid of at least 1 wavelength")
        if not np.all(np.diff(w) > 0):
            raise ValueError("wavelengths must be strictly increasing")
        object.__setattr__(self, "wavelengths", w)
        for name in ("r", "g", "b", "combined"):
            a = np.asarray(getattr(self, name), dtype=np.float64)
            if a.shape != w.shape:
                raise ValueError(f"{name} must match the wavelength grid shape")
            object.__setattr__(self, name, a)

    @property
    def n(self) -> int:
        return self.wavelengths.shape[0]

    @property
    def lambda_min(self) -> float:
        return float(self.wavelengths[0])

    @property
    def lambda_max(self) -> float:
        return float(self.wavelengths[-1])

    def __eq__(self, other):
        if not isinstance(other, CalibratedSpectrum):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("wavelengths", "r", "g", "b", "combined")
        )


def apply_calibration(raw: RawSpectrum, cal: WavelengthCalibration) -> CalibratedSpectrum:
    """Assign wavelengths to the raw spectrum's pixel axis.

    Point i maps from pixel col_start + i. A decreasing calibration flips
    the point order so the output grid always ascends.
    """
    wavelengths = cal.map(raw.pixel_axis())
    r, g, b, combined = raw.r, raw.g, raw.b, raw.combined
    if wavelengths[0] > wavelengths[-1]:
        wavelengths = wavelengths[::-1]
        r, g, b, combined = r[::-1], g[::-1], b[::-1], combined[::-1]
    return CalibratedSpectrum(wavelengths=wavelengths, r=r, g=g, b=b, combined=combined)


def resample(spectrum: CalibratedSpectrum, grid) -> CalibratedSpectrum:
    """Linearly interpolate every channel onto an ascending nm grid."""
    target = np.asarray(grid, dtype=np.float64)
    if target.ndim != 1 or target.shape[0] < 1 or not np.all(np.diff(target) > 0):
        raise ValueError("grid must be a strictly increasing 1-D array")
    if target[0] < spectrum.lambda_min or target[-1] > spectrum.lambda_max:
        raise GridOutOfRange(
            f"grid [{target[0]}, {target[-1]}] outside spectrum range "
            f"[{spectrum.lambda_min}, {spectrum.lambda_max}]"
        )
    if np.array_equal(target, spectrum.wavelengths):
        return spectrum
    w = spectrum.wavelengths
    return CalibratedSpectrum(
        wavelengths=target,
        r=np.interp(target, w, spectrum.r),
        g=np.interp(target, w, spectrum.g),
        b=np.interp(target, w, spectrum.b),
        combined=np.interp(target, w, spectrum.combined),
    )
