"""Transmittance and absorbance from a blank/sample spectrum pair."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AllPointsFloored,
    BracketingPointsFlagged,
    EmptyRange,
    NoOverlap,
    WavelengthOutOfRange,
)
from .wavelength import CalibratedSpectrum, resample

# One 8-bit quantization step: below this the blank carries no signal and
# dividing by it would only amplify digitization noise.
DEFAULT_INTENSITY_FLOOR = 1.0 / 255.0

FLAG_OK = "ok"
FLAG_FLOORED = "floored"
FLAG_SATURATED = "saturated"
FLAGS = (FLAG_OK, FLAG_FLOORED, FLAG_SATURATED)


@dataclass(frozen=True)
class AbsorptionMeasurement:
    """Per-wavelength T = I/I0 and A = -log10(T) with quality flags.

    Floored points (blank below the intensity floor) carry NaN in both
    arrays. Saturated points (T > 1) keep their negative absorbance.
    """

    blank: CalibratedSpectrum
    sample: CalibratedSpectrum
    wavelengths: np.ndarray
    transmittance: np.ndarray
    absorbance: np.ndarray
    flags: tuple

    def __post_init__(self):
        w = np.asarray(self.wavelengths, dtype=np.float64)
        t = np.asarray(self.transmittance, dtype=np.float64)
        a = np.asarray(self.absorbance, dtype=np.float64)
        if not (w.shape == t.shape == a.shape and w.ndim == 1):
            raise ValueError("wavelengths, transmittance, absorbance must be 1-D and equal length")
        if len(self.flags) != w.shape[0]:
            raise ValueError("one flag per point required")
        object.__setattr__(self, "wavelengths", w)
        object.__setattr__(self, "transmittance", t)
        object.__setattr__(self, "absorbance", a)
        object.__setattr__(self, "flags", tuple(self.flags))

    @property
    def n(self) -> int:
        return self.wavelengths.shape[0]

    def ok_mask(self) -> np.ndarray:
        return np.array([f == FLAG_OK for f in self.flags])


def transmittance_to_absorbance(t):
    """A = -log10(T); scalar or array."""
    return -np.log10(t)


def measure_absorption(
    blank: CalibratedSpectrum,
    sample: CalibratedSpectrum,
    floor: float = DEFAULT_INTENSITY_FLOOR,
) -> AbsorptionMeasurement:
    """Compare sample to blank on the blank's grid restricted to the overlap.

    Uses the combined channel of both spectra. Points where the blank falls
    below ``floor`` are flagged "floored" and excluded (NaN); points with
    T > 1 are kept with negative absorbance and flagged "saturated".
    """
    if floor <= 0:
        raise ValueError("intensity floor must be positive")
    lo = max(blank.lambda_min, sample.lambda_min)
    hi = min(blank.lambda_max, sample.lambda_max)
    if lo > hi:
        raise NoOverlap(
            f"blank [{blank.lambda_min}, {blank.lambda_max}] and sample "
            f"[{sample.lambda_min}, {sample.lambda_max}] do not overlap"
        )
    keep = (blank.wavelengths >= lo) & (blank.wavelengths <= hi)
    if not keep.any():
        raise NoOverlap("no blank grid point falls inside the overlap range")
    grid = blank.wavelengths[keep]
    i0 = blank.combined[keep]
    sample_on_grid = resample(sample, grid)
    i1 = sample_on_grid.combined

    n = grid.shape[0]
    t = np.full(n, np.nan)
    a = np.full(n, np.nan)
    flags = []
    usable = i0 >= floor
    if not usable.any():
        raise AllPointsFloored(f"every blank intensity is below the floor {floor}")
    t[usable] = i1[usable] / i0[usable]
    positive = usable & (t > 0)
    a[positive] = transmittance_to_absorbance(t[positive])
    a[usable & (t == 0)] = np.inf
    for i in range(n):
        if not usable[i]:
            flags.append(FLAG_FLOORED)
        elif t[i] > 1.0:
            flags.append(FLAG_SATURATED)
        else:
            flags.append(FLAG_OK)
    return AbsorptionMeasurement(
        blank=blank,
        sample=sample_on_grid,
        wavelengths=grid,
        transmittance=t,
        absorbance=a,
        flags=tuple(flags),
    )


def lambda_max(measurement: AbsorptionMeasurement, wavelength_range=None) -> float:
    """Wavelength of peak absorbance among unflagged points.

    Ties break toward the smallest wavelength. ``wavelength_range`` is an
    optional inclusive (lo, hi) restriction in nm.
    """
    mask = measurement.ok_mask()
    if wavelength_range is not None:
        lo, hi = wavelength_range
        mask &= (measurement.wavelengths >= lo) & (measurement.wavelengths <= hi)
    if not mask.any():
        raise EmptyRange("no unflagged point inside the requested range")
    idx = np.flatnonzero(mask)
    a = measurement.absorbance[idx]
    # argmax returns the first maximum, which is the smallest wavelength
    return float(measurement.wavelengths[idx[np.argmax(a)]])


def absorbance_at(measurement: AbsorptionMeasurement, wavelength: float) -> float:
    """Absorbance linearly interpolated at ``wavelength``.

    The bracketing grid points (or the exact grid point hit) must be
    unflagged.
    """
    w = measurement.wavelengths
    if wavelength < w[0] or wavelength > w[-1]:
        raise WavelengthOutOfRange(
            f"{wavelength} nm outside measured range [{w[0]}, {w[-1]}]"
        )
    right = int(np.searchsorted(w, wavelength, side="left"))
    if w[right] == wavelength:
        if measurement.flags[right] != FLAG_OK:
            raise BracketingPointsFlagged(
                f"point at {wavelength} nm is flagged {measurement.flags[right]}"
            )
        return float(measurement.absorbance[right])
    left = right - 1
    for i in (left, right):
        if measurement.flags[i] != FLAG_OK:
            raise BracketingPointsFlagged(
                f"bracketing point at {w[i]} nm is flagged {measurement.flags[i]}"
            )
    frac = (wavelength - w[left]) / (w[right] - w[left])
    return float(measurement.absorbance[left] * (1.0 - frac)
                 + measurement.absorbance[right] * frac)
