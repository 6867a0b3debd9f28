"""HSV skin classification producing the binary silhouette."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .image import as_rgb_image, rgb_to_hsv_image

# Conventional skin band; the experiments behind the original system never
# published their thresholds, so these are overridable defaults only.
DEFAULT_HUE = (0.0, 50.0)
DEFAULT_SAT = (0.20, 0.68)
DEFAULT_VAL = (0.30, 1.0)


@dataclass(frozen=True)
class SkinBounds:
    """Inclusive HSV box for the skin class.

    The hue interval may wrap past 360 (e.g. lo=330, hi=30 selects reds
    on both sides of zero). Setting the value interval to [0, 1]
    reproduces the brightness-independent variant.
    """

    hue_lo: float = DEFAULT_HUE[0]
    hue_hi: float = DEFAULT_HUE[1]
    sat_lo: float = DEFAULT_SAT[0]
    sat_hi: float = DEFAULT_SAT[1]
    value_lo: float = DEFAULT_VAL[0]
    value_hi: float = DEFAULT_VAL[1]

    def __post_init__(self):
        if not (0.0 <= self.hue_lo < 360.0 and 0.0 <= self.hue_hi < 360.0):
            raise ValueError("hue bounds must lie in [0, 360)")
        if self.sat_lo > self.sat_hi:
            raise ValueError("sat_lo must not exceed sat_hi")
        if self.value_lo > self.value_hi:
            raise ValueError("value_lo must not exceed value_hi")
        for name in ("sat_lo", "sat_hi", "value_lo", "value_hi"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")

    @property
    def hue_wraps(self) -> bool:
        return self.hue_lo > self.hue_hi

    def contains(self, hue: float, sat: float, value: float) -> bool:
        """Inclusive membership test for a single HSV pixel."""
        if self.hue_wraps:
            hue_ok = hue >= self.hue_lo or hue <= self.hue_hi
        else:
            hue_ok = self.hue_lo <= hue <= self.hue_hi
        return (hue_ok
                and self.sat_lo <= sat <= self.sat_hi
                and self.value_lo <= value <= self.value_hi)


def segment_skin(image: np.ndarray, bounds: SkinBounds = SkinBounds()) -> np.ndarray:
    """Classify every pixel of an RGB frame as skin, returning a bool mask.

    A pixel is foreground iff its HSV triple lies inside `bounds`, all
    boundaries inclusive and the hue test wrap-aware. Output has the
    same (H, W) shape as the input frame.
    """
    hsv = rgb_to_hsv_image(as_rgb_image(image))
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    if bounds.hue_wraps:
        hue_ok = (h >= bounds.hue_lo) | (h <= bounds.hue_hi)
    else:
        hue_ok = (h >= bounds.hue_lo) & (h <= bounds.hue_hi)
    return (hue_ok
            & (s >= bounds.sat_lo) & (s <= bounds.sat_hi)
            & (v >= bounds.value_lo) & (v <= bounds.value_hi))


class SkinSegmenter(TransformerMixin, BaseEstimator):
    """Stateless transformer wrapping segment_skin for pipeline composition."""

    def __init__(self, hue_lo=DEFAULT_HUE[0], hue_hi=DEFAULT_HUE[1],
                 sat_lo=DEFAULT_SAT[0], sat_hi=DEFAULT_SAT[1],
                 value_lo=DEFAULT_VAL[0], value_hi=DEFAULT_VAL[1]):
        self.hue_lo = hue_lo
        self.hue_hi = hue_hi
        self.sat_lo = sat_lo
        self.sat_hi = sat_hi
        self.value_lo = value_lo
        self.value_hi = value_hi

    def _bounds(self) -> SkinBounds:
        return SkinBounds(self.hue_lo, self.hue_hi, self.sat_lo,
                          self.sat_hi, self.value_lo, self.value_hi)

    def fit(self, X=None, y=None):
        self._bounds()  # validate parameters
        return self

    def transform(self, X) -> np.ndarray:
        return segment_skin(X, self._bounds())
