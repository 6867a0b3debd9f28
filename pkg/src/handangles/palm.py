"""Centre-of-palm detection via the full-skin window vote.

Every window position fully inside a hand's bounding box whose skin
count reaches the fill threshold votes with its center; the palm center
is the mean of the votes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blobs import BASELINE_AREA, HandRegion
from .errors import HandTooSmall, NoPalmFound
from .image import Point, as_mask

DEFAULT_WINDOW = 30
# Fully-skin windows only: partially-out-of-palm windows over wide
# finger bases otherwise qualify and drag the vote toward the fingers.
DEFAULT_FILL_MIN = 1.0


@dataclass(frozen=True)
class PalmCenter:
    """Mean of all qualifying window centers for one hand."""

    cop: Point
    candidate_count: int
    hand_ordinal: int


def scaled_window(base_window: int, shape: tuple[int, int]) -> int:
    """Scale the palm window with linear image size relative to 240x230."""
    factor = math.sqrt(shape[0] * shape[1] / BASELINE_AREA)
    return max(2, round(base_window * factor))


def find_cop(mask: np.ndarray, hand: HandRegion, window: int = DEFAULT_WINDOW,
             fill_min: float = DEFAULT_FILL_MIN) -> PalmCenter:
    """Locate the palm center of one hand.

    Slides a window x window mask over every position fully inside the
    hand's bounding box; positions whose foreground count is at least
    fill_min * window**2 contribute their center as a candidate, and
    the returned point is the rounded mean of all candidates.

    Raises HandTooSmall when the bounding box cannot contain the window
    and NoPalmFound when no position reaches the fill fraction (both
    are reported as "no palm": HandTooSmall subclasses NoPalmFound).
    """
    m = as_mask(mask)
    if not 0.0 < fill_min <= 1.0:
        raise ValueError("fill_min must lie in (0, 1]")
    bbox = hand.bbox
    if bbox.height < window or bbox.width < window:
        raise HandTooSmall(
            f"hand bbox {bbox.height}x{bbox.width} is smaller than the "
            f"{window}x{window} palm window")

    sub = m[bbox.top:bbox.bottom, bbox.left:bbox.right].astype(np.int64)
    integral = np.zeros((bbox.height + 1, bbox.width + 1), dtype=np.int64)
    np.cumsum(np.cumsum(sub, axis=0), axis=1, out=integral[1:, 1:])
    counts = (integral[window:, window:] - integral[:-window, window:]
              - integral[window:, :-window] + integral[:-window, :-window])

    tops, lefts = np.nonzero(counts >= fill_min * window * window)
    if tops.size == 0:
        raise NoPalmFound(
            f"no {window}x{window} window reaches fill fraction {fill_min}")

    half = (window - 1) / 2.0
    cop = Point(math.floor(tops.mean() + half + bbox.top + 0.5),
                math.floor(lefts.mean() + half + bbox.left + 0.5))
    return PalmCenter(cop=cop, candidate_count=int(tops.size),
                      hand_ordinal=hand.ordinal)
