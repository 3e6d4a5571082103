"""Forward models: lamp emission, dye absorption, camera rendering config."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LampModel:
    """Smooth emission spectrum: baseline plus Gaussian peaks.

    Each peak is (center_nm, sigma_nm, height). Baseline and peak heights
    must be non-negative with baseline + sum(heights) <= 1 so intensities
    stay inside [0, 1] everywhere.
    """

    peaks: tuple
    baseline: float
    lambda_lo: float
    lambda_hi: float

    def __post_init__(self):
        if not self.lambda_lo < self.lambda_hi:
            raise ValueError("need lambda_lo < lambda_hi")
        peaks = tuple((float(c), float(s), float(h)) for c, s, h in self.peaks)
        object.__setattr__(self, "peaks", peaks)
        if self.baseline < 0:
            raise ValueError("baseline must be >= 0")
        total = self.baseline + sum(h for _, _, h in peaks)
        if total > 1.0:
            raise ValueError(f"baseline + peak heights = {total} exceed full scale 1.0")
        for _, sigma, h in peaks:
            if sigma <= 0:
                raise ValueError("peak sigma must be positive")
            if h < 0:
                raise ValueError("peak height must be >= 0")

    def intensity(self, wavelength_nm):
        """Emitted intensity in [0, 1] at the given wavelength(s)."""
        lam = np.asarray(wavelength_nm, dtype=np.float64)
        out = np.full(lam.shape, self.baseline)
        for center, sigma, height in self.peaks:
            out += height * np.exp(-((lam - center) ** 2) / (2.0 * sigma * sigma))
        return float(out) if np.ndim(wavelength_nm) == 0 else out


@dataclass(frozen=True)
class DyeModel:
    """Gaussian absorption profile with unit peak height.

    Absorbance follows A(lambda) = strength * c * g(lambda) where
    g(lambda) = exp(-(lambda - center)^2 / (2 sigma^2)).
    """

    center: float
    sigma: float
    strength: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.strength < 0:
            raise ValueError("strength must be >= 0")

    def profile(self, wavelength_nm):
        """Unit-peak absorption shape g(lambda) >= 0, g(center) = 1."""
        lam = np.asarray(wavelength_nm, dtype=np.float64)
        out = np.exp(-((lam - self.center) ** 2) / (2.0 * self.sigma * self.sigma))
        return float(out) if np.ndim(wavelength_nm) == 0 else out

    def absorbance(self, wavelength_nm, concentration: float):
        """A(lambda) = strength * c * g(lambda)."""
        g = self.profile(wavelength_nm)
        return self.strength * concentration * g


@dataclass(frozen=True)
class RenderConfig:
    """Camera and geometry of the rendered spectrum photograph.

    Columns 0 .. width-1 map linearly onto [lambda_min, lambda_max]; the
    spectrum occupies rows band_top .. band_bottom inclusive with identical
    values on R, G and B. With quantize the image is rounded to 8-bit,
    otherwise channel values stay exact floats (scaled to [0, 255]).
    """

    width: int = 360
    height: int = 60
    lambda_min: float = 380.0
    lambda_max: float = 740.0
    band_top: int = 20
    band_bottom: int = 39
    quantize: bool = True
    noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.width < 2 or self.height < 1:
            raise ValueError("image must be at least 2x1")
        if not self.lambda_min < self.lambda_max:
            raise ValueError("mapping span must be positive")
        if not (0 <= self.band_top <= self.band_bottom < self.height):
            raise ValueError("band must lie inside the image")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")

    def wavelength_of_column(self, col):
        """Wavelength at pixel column(s); inverse of column_of_wavelength."""
        c = np.asarray(col, dtype=np.float64)
        step = (self.lambda_max - self.lambda_min) / (self.width - 1)
        lam = self.lambda_min + c * step
        return float(lam) if np.ndim(col) == 0 else lam

    def column_of_wavelength(self, wavelength_nm):
        lam = np.asarray(wavelength_nm, dtype=np.float64)
        step = (self.lambda_max - self.lambda_min) / (self.width - 1)
        col = (lam - self.lambda_min) / step
        return float(col) if np.ndim(wavelength_nm) == 0 else col

    @property
    def band_row(self) -> int:
        """Center row of the band (rounded down for even band heights)."""
        return (self.band_top + self.band_bottom) // 2

    @property
    def band_half_width(self) -> int:
        """Largest half width around band_row that stays inside the band."""
        return min(self.band_row - self.band_top, self.band_bottom - self.band_row)
