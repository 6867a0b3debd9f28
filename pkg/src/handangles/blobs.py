"""8-connected component labeling and hand selection.

The two largest foreground components are treated as hands and ordered
by where they enter the scene from the left, so each hand's parameters
are only ever compared against that same hand downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .image import Rect, as_mask

EIGHT_CONNECTED = np.ones((3, 3), dtype=int)

# Smallest blob still considered a hand at the 240x230 baseline; anything
# smaller is treated as stray skin-colored noise.
DEFAULT_MIN_HAND_PIXELS = 200
BASELINE_AREA = 240 * 230


@dataclass(frozen=True)
class LabeledRegions:
    """Dense per-pixel component ids (0 = background) plus per-id sizes."""

    labels: np.ndarray
    n_components: int
    sizes: np.ndarray  # indexed by component id; sizes[0] is background

    def size_of(self, component_id: int) -> int:
        return int(self.sizes[component_id])


@dataclass(frozen=True)
class HandRegion:
    """One selected hand blob.

    `pixels` is the blob's own foreground restricted to `bbox` (other
    blobs excluded), so per-hand filters never leak across hands.
    `ordinal` 0 is the hand whose pixels enter the scene leftmost.
    """

    id: int
    pixel_count: int
    bbox: Rect
    leftmost_col: int
    topmost_row: int
    ordinal: int
    pixels: np.ndarray = field(repr=False, compare=False)

    def full_mask(self, shape: tuple[int, int]) -> np.ndarray:
        """This hand's silhouette as a full-frame boolean mask."""
        out = np.zeros(shape, dtype=bool)
        out[self.bbox.top:self.bbox.bottom, self.bbox.left:self.bbox.right] = self.pixels
        return out


def label_components(mask: np.ndarray) -> LabeledRegions:
    """Label 8-connected foreground components with dense ids from 1."""
    m = as_mask(mask)
    labels, n = ndimage.label(m, structure=EIGHT_CONNECTED)
    sizes = np.bincount(labels.ravel(), minlength=n + 1)
    sizes[0] = 0
    return LabeledRegions(labels=labels, n_components=int(n), sizes=sizes)


def scaled_min_size(base_min_size: int, shape: tuple[int, int]) -> int:
    """Scale the minimum hand size with image area relative to 240x230."""
    area = shape[0] * shape[1]
    return max(1, round(base_min_size * area / BASELINE_AREA))


def select_hands(regions: LabeledRegions,
                 min_size: int = DEFAULT_MIN_HAND_PIXELS) -> list[HandRegion]:
    """Keep the up-to-two biggest components of size >= min_size as hands.

    Size ties are broken toward the component with the smaller leftmost
    column; ordinals are then assigned by ascending leftmost column
    (ties by topmost row), independent of size. Returns an empty list
    when nothing qualifies, which downstream stages treat as "no hands".
    """
    if min_size < 1:
        raise ValueError("min_size must be >= 1")
    if regions.n_components == 0:
        return []

    slices = ndimage.find_objects(regions.labels)
    candidates = []
    for cid in range(1, regions.n_components + 1):
        size = regions.size_of(cid)
        if size < min_size:
            continue
        sl = slices[cid - 1]
        bbox = Rect(sl[0].start, sl[1].start, sl[0].stop, sl[1].stop)
        candidates.append((size, bbox.left, bbox.top, cid, bbox))
    if not candidates:
        return []

    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    kept = candidates[:2]
    kept.sort(key=lambda c: (c[1], c[2]))

    hands = []
    for ordinal, (size, left, top, cid, bbox) in enumerate(kept):
        pixels = regions.labels[bbox.top:bbox.bottom, bbox.left:bbox.right] == cid
        hands.append(HandRegion(id=cid, pixel_count=size, bbox=bbox,
                                leftmost_col=left, topmost_row=top,
                                ordinal=ordinal, pixels=pixels))
    return hands
