"""Render spectrum photographs from the lamp/dye forward model."""

from __future__ import annotations

import numpy as np

from ..image import RasterImage
from .models import DyeModel, LampModel, RenderConfig


def _render(intensity: np.ndarray, cfg: RenderConfig) -> RasterImage:
    """Write a per-column intensity curve into the band rows of an image.

    The curve (normalized [0, 1]) lands identically on R, G and B. Noise is
    per-pixel, per-channel Gaussian in normalized units, applied to the whole
    frame; values are clipped to [0, 1] before optional 8-bit rounding.
    """
    frame = np.zeros((cfg.height, cfg.width, 3), dtype=np.float64)
    frame[cfg.band_top:cfg.band_bottom + 1, :, :] = intensity[np.newaxis, :, np.newaxis]
    if cfg.noise_sigma > 0:
        rng = np.random.default_rng(cfg.rng_seed)
        frame += rng.normal(0.0, cfg.noise_sigma, size=frame.shape)
        frame = np.clip(frame, 0.0, 1.0)
    scaled = frame * 255.0
    if cfg.quantize:
        return RasterImage(np.round(scaled).astype(np.uint8))
    return RasterImage(scaled)


def render_blank(lamp: LampModel, cfg: RenderConfig) -> RasterImage:
    """Photograph of the bare lamp spectrum (the incident intensity I0)."""
    lam = cfg.wavelength_of_column(np.arange(cfg.width))
    return _render(lamp.intensity(lam), cfg)


def render_sample(lamp: LampModel, dye: DyeModel, concentration: float,
                  cfg: RenderConfig) -> RasterImage:
    """Photograph of the lamp through the dye: I = I0 * 10^(-strength*c*g)."""
    if concentration < 0:
        raise ValueError("concentration must be >= 0")
    lam = cfg.wavelength_of_column(np.arange(cfg.width))
    i0 = lamp.intensity(lam)
    transmitted = i0 * np.power(10.0, -dye.absorbance(lam, concentration))
    return _render(transmitted, cfg)
