"""Raster images of diffracted spectra: decoding, rotation, orientation.

Images decoded from files carry integer 8-bit channels. The synthetic
bench may construct float-valued images (channels still in [0, 255]) so
that the unquantized forward model stays exact end to end.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage, UnidentifiedImageError

from .errors import MalformedImage, UnsupportedFormat

ROTATIONS = ("as-is", "rotate-90", "rotate-180", "rotate-270")


@dataclass(frozen=True)
class RasterImage:
    """Decoded RGB photograph, row-major (height, width, 3) channel grid."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"pixel grid must be (height, width, 3), got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if px.dtype != np.uint8:
            px = px.astype(np.float64, copy=False)
            if not np.isfinite(px).all():
                raise ValueError("channel values must be finite")
            if px.min() < 0 or px.max() > 255:
                raise ValueError("channel values must lie in [0, 255]")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.pixels.dtype == other.pixels.dtype and np.array_equal(
            self.pixels, other.pixels
        )


def decode_image(data: bytes, format: str = "png") -> RasterImage:
    """Decode PNG or JPEG bytes to an RGB image; alpha is discarded.

    Raises UnsupportedFormat for formats other than png/jpeg and
    MalformedImage when the bytes do not parse as the stated format.
    """
    fmt = format.lower()
    if fmt not in ("png", "jpeg", "jpg"):
        raise UnsupportedFormat(f"unsupported image format: {format!r}")
    expected = "JPEG" if fmt in ("jpeg", "jpg") else "PNG"
    try:
        with PILImage.open(io.BytesIO(data)) as im:
            if im.format != expected:
                raise MalformedImage(
                    f"bytes are {im.format or 'unknown'}, expected {expected}"
                )
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise MalformedImage(f"cannot decode {expected} data: {exc}") from exc
    return RasterImage(arr)


def encode_png(image: RasterImage) -> bytes:
    """Encode to PNG (lossless). Float-valued images are rounded to 8-bit."""
    px = image.pixels
    if px.dtype != np.uint8:
        px = np.clip(np.round(px), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    PILImage.fromarray(px, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def rotate(image: RasterImage, rotation: str) -> RasterImage:
    """Rotate by a quarter-turn multiple ("as-is" is the identity)."""
    k = _rotation_index(rotation)
    if k == 0:
        return image
    return RasterImage(np.rot90(image.pixels, k))


def _rotation_index(rotation: str) -> int:
    try:
        return ROTATIONS.index(rotation)
    except ValueError:
        raise ValueError(f"unknown rotation {rotation!r}; expected one of {ROTATIONS}")


def _axis_score(pixels: np.ndarray) -> float:
    """Variance of the per-column mean intensity over the lit region.

    A photographed spectrum is a bright strip on a dark matte; the matte
    must be cropped away first, or the strip's own on/off silhouette
    out-varies the spectral profile and the wrong axis wins. Rows and
    columns brighter than half the brightest one bound the lit region.
    Sums are taken in int64 (or float64) so the score is invariant under
    row permutation, and the profile is sorted before the variance so
    mirror-image rotations tie bit-exactly and fall to the tie-break order.
    """
    kind = np.int64 if pixels.dtype == np.uint8 else np.float64
    plane = pixels.sum(axis=2, dtype=kind)
    row_sums = plane.sum(axis=1)
    if row_sums.max() == 0:  # fully dark frame: nothing to orient by
        return 0.0
    lit = plane[np.ix_(2 * row_sums > row_sums.max(),
                       2 * plane.sum(axis=0) > plane.sum(axis=0).max())]
    totals = lit.sum(axis=0)
    denom = 3.0 * 255.0 * lit.shape[0]
    profile = np.sort(totals / denom)
    # anchor at the low end so a constant profile scores exactly zero
    # (np.var alone can leave rounding dust that breaks tie-breaking)
    return float(np.var(profile - profile[0]))


def auto_orient(image: RasterImage) -> str:
    """Pick the rotation that lays the dispersion axis along the columns.

    A spectrum varies along its dispersion axis and is flat across it, so
    within the lit region the correct orientation maximizes the variance
    of the column-mean intensity profile. Ties resolve to the earliest
    entry of ROTATIONS.
    """
    scores = [_axis_score(np.rot90(image.pixels, k)) for k in range(4)]
    best = max(range(4), key=lambda k: (scores[k], -k))
    return ROTATIONS[best]
