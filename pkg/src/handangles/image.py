"""Pixel buffer conventions, color conversion, and mask primitives.

Coordinate convention used throughout the package: ``row`` increases
downward, ``col`` increases rightward. Angles are measured
counter-clockwise from the +col axis in conventional math orientation,
so a direction of 90 degrees points toward smaller row indices. Images
are numpy arrays: RGB frames are ``(H, W, 3) uint8``, binary
silhouettes are ``(H, W) bool``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class Point(NamedTuple):
    """Integer pixel coordinate."""

    row: int
    col: int


class Rect(NamedTuple):
    """Half-open pixel rectangle: rows [top, bottom), cols [left, right)."""

    top: int
    left: int
    bottom: int
    right: int

    @property
    def height(self) -> int:
        return self.bottom - self.top

    @property
    def width(self) -> int:
        return self.right - self.left

    @property
    def area(self) -> int:
        return max(0, self.height) * max(0, self.width)

    def clipped(self, height: int, width: int) -> "Rect":
        """Intersect with an image of the given dimensions."""
        return Rect(
            max(0, self.top),
            max(0, self.left),
            min(height, self.bottom),
            min(width, self.right),
        )

    def contains(self, point: Point) -> bool:
        return self.top <= point.row < self.bottom and self.left <= point.col < self.right

    def expanded(self, margin: int) -> "Rect":
        return Rect(self.top - margin, self.left - margin,
                    self.bottom + margin, self.right + margin)


class HsvPixel(NamedTuple):
    """Hue in degrees [0, 360), saturation and value as fractions in [0, 1]."""

    hue: float
    saturation: float
    value: float


def as_rgb_image(image) -> np.ndarray:
    """Validate and return an (H, W, 3) uint8 RGB array.

    Raises ValueError for anything that is not an 8-bit three-channel
    raster with at least one pixel.
    """
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) RGB array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixels, got {arr.dtype}; quantize first")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image must contain at least one pixel")
    return arr


def as_mask(mask) -> np.ndarray:
    """Validate and return an (H, W) bool silhouette array."""
    arr = np.asarray(mask)
    if arr.ndim != 2:
        raise ValueError(f"expected an (H, W) mask, got shape {arr.shape}")
    if arr.dtype != np.bool_:
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("mask values must be 0 or 1")
        arr = arr.astype(bool)
    return arr


def rgb_to_hsv(pixel) -> HsvPixel:
    """Convert one 8-bit RGB triple to HSV via the standard hexcone model.

    Hue is reported as 0 when saturation is 0 so downstream predicates
    stay total.
    """
    r, g, b = (int(c) / 255.0 for c in pixel)
    v = max(r, g, b)
    lo = min(r, g, b)
    delta = v - lo
    s = 0.0 if v == 0.0 else delta / v
    if delta == 0.0:
        h = 0.0
    elif v == r:
        h = (60.0 * ((g - b) / delta)) % 360.0
    elif v == g:
        h = 60.0 * ((b - r) / delta) + 120.0
    else:
        h = 60.0 * ((r - g) / delta) + 240.0
    return HsvPixel(h, s, v)


def hsv_to_rgb(pixel: HsvPixel) -> tuple[int, int, int]:
    """Inverse hexcone conversion back to a rounded 8-bit triple."""
    h, s, v = pixel
    h = h % 360.0
    c = v * s
    x = c * (1.0 - abs((h / 60.0) % 2.0 - 1.0))
    m = v - c
    sector = int(h // 60.0) % 6
    rgb = [(c, x, 0.0), (x, c, 0.0), (0.0, c, x),
           (0.0, x, c), (x, 0.0, c), (c, 0.0, x)][sector]
    return tuple(int(round((ch + m) * 255.0)) for ch in rgb)


def rgb_to_hsv_image(image: np.ndarray) -> np.ndarray:
    """Vectorized hexcone conversion of an (H, W, 3) uint8 image.

    Returns an (H, W, 3) float64 array of (hue, saturation, value)
    matching rgb_to_hsv exactly on every pixel.
    """
    arr = as_rgb_image(image).astype(np.float64) / 255.0
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    v = arr.max(axis=2)
    delta = v - arr.min(axis=2)
    chromatic = delta > 0.0
    s = np.zeros_like(v)
    np.divide(delta, v, out=s, where=v > 0.0)

    h = np.zeros_like(v)
    rmax = chromatic & (v == r)
    h[rmax] = (60.0 * ((g[rmax] - b[rmax]) / delta[rmax])) % 360.0
    gmax = chromatic & (v == g) & ~rmax
    h[gmax] = 60.0 * ((b[gmax] - r[gmax]) / delta[gmax]) + 120.0
    bmax = chromatic & ~rmax & ~gmax
    h[bmax] = 60.0 * ((r[bmax] - g[bmax]) / delta[bmax]) + 240.0
    return np.stack([h, s, v], axis=2)


def mask_region_pixels(mask: np.ndarray, rect: Rect) -> int:
    """Count foreground pixels of `mask` inside `rect` (clipped to bounds)."""
    m = as_mask(mask)
    r = Rect(*rect).clipped(*m.shape)
    if r.height <= 0 or r.width <= 0:
        return 0
    return int(np.count_nonzero(m[r.top:r.bottom, r.left:r.right]))
