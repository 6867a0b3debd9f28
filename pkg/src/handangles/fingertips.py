"""Fingertip detection: separability filtering, orientation, tip tracing.

The circular separability filter scores how strongly a pixel
neighborhood looks like a round foreground cap over an emptier
surround; thresholded high-score groups give approximate tips. A
concentric circular filter then orients each finger from the local
foreground centroid, and the exact tip is traced along that direction
to the silhouette edge.

Window convention: a square window of side ``s`` centered at ``p``
covers offsets ``-(s//2) .. s - s//2 - 1`` on both axes (so even sides
extend one pixel further up/left than down/right); a circle of radius
``r`` covers offsets with ``dr**2 + dc**2 <= r**2``. Windows are
clipped at image borders and the clipped part is excluded from both
counts and areas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import ndimage

from .blobs import EIGHT_CONNECTED, HandRegion
from .errors import DegenerateNeighborhood
from .image import Point, Rect, as_mask

MAX_TIPS_PER_HAND = 5


@dataclass(frozen=True)
class CsfGeometry:
    """Circular separability filter: a circle concentric in a square."""

    circle_radius: int = 5
    square_side: int = 20

    def __post_init__(self):
        if self.circle_radius < 1 or self.square_side < 1:
            raise ValueError("filter dimensions must be positive")
        if 2 * self.circle_radius >= self.square_side:
            raise ValueError("circle must fit strictly inside the square")


@dataclass(frozen=True)
class CcfGeometry:
    """Concentric circular filter with level-set weights per region."""

    inner_diameter: int = 10
    outer_diameter: int = 20
    inner_weight: int = 2
    mid_weight: int = -2
    outer_weight: int = 0

    def __post_init__(self):
        if self.inner_diameter < 2:
            raise ValueError("inner diameter too small")
        if self.inner_diameter >= self.outer_diameter:
            raise ValueError("inner circle must be smaller than the outer one")

    @property
    def inner_radius(self) -> int:
        return self.inner_diameter // 2


@dataclass(frozen=True)
class TipCandidate:
    """Approximate fingertip: centroid of one thresholded filter group."""

    approx: Point
    group_size: int
    hand_ordinal: int


@dataclass(frozen=True)
class Fingertip:
    """Refined tip on the silhouette boundary with finger orientation."""

    exact: Point
    theta: float  # degrees CCW from +col axis, in [0, 360)
    hand_ordinal: int


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


@lru_cache(maxsize=None)
def disk_kernel(radius: int) -> np.ndarray:
    """Boolean (2r+1)^2 grid of offsets inside the radius-r circle."""
    span = np.arange(-radius, radius + 1)
    dr, dc = np.meshgrid(span, span, indexing="ij")
    kernel = dr * dr + dc * dc <= radius * radius
    kernel.flags.writeable = False
    return kernel


@lru_cache(maxsize=None)
def _circle_area_field(shape: tuple[int, int], radius: int) -> np.ndarray:
    """In-bounds circle area at every center of an image of `shape`."""
    ones = np.ones(shape, dtype=np.int64)
    area = ndimage.correlate(ones, disk_kernel(radius).astype(np.int64),
                             mode="constant", cval=0)
    area.flags.writeable = False
    return area


def _window_slices(center: Point, lo: int, hi: int,
                   shape: tuple[int, int]):
    """Clip the offset box [lo, hi) around `center` against the image.

    Returns (row slice, col slice) into the image and the matching
    slices into a kernel whose index 0 corresponds to offset `lo`.
    """
    h, w = shape
    r0, r1 = max(0, center.row + lo), min(h, center.row + hi)
    c0, c1 = max(0, center.col + lo), min(w, center.col + hi)
    kr0, kc0 = r0 - (center.row + lo), c0 - (center.col + lo)
    return ((slice(r0, r1), slice(c0, c1)),
            (slice(kr0, kr0 + (r1 - r0)), slice(kc0, kc0 + (c1 - c0))))


def csf_response(mask: np.ndarray, center: Point,
                 geom: CsfGeometry = CsfGeometry()) -> float:
    """Separability score at one pixel, in [-1, 1].

    Score = (foreground fraction inside the circle) minus (foreground
    fraction in the square-minus-circle annulus). Uniform windows score
    0; an isolated foreground cap the size of the circle scores near 1.
    """
    m = as_mask(mask)
    r, s = geom.circle_radius, geom.square_side
    kernel = disk_kernel(r)

    (img_sl, k_sl) = _window_slices(center, -r, r + 1, m.shape)
    circ_fg = int(np.count_nonzero(m[img_sl] & kernel[k_sl]))
    circ_area = int(np.count_nonzero(kernel[k_sl]))

    (sq_sl, _) = _window_slices(center, -(s // 2), s - s // 2, m.shape)
    sq_fg = int(np.count_nonzero(m[sq_sl]))
    sq_area = ((sq_sl[0].stop - sq_sl[0].start)
               * (sq_sl[1].stop - sq_sl[1].start))

    ann_fg = sq_fg - circ_fg
    ann_area = sq_area - circ_area
    inside = circ_fg / circ_area if circ_area > 0 else 0.0
    outside = ann_fg / ann_area if ann_area > 0 else 0.0
    return inside - outside


def csf_response_field(mask: np.ndarray, geom: CsfGeometry = CsfGeometry(),
                       rect: Rect | None = None) -> np.ndarray:
    """Separability score at every pixel of `rect` (default whole image).

    Equals csf_response evaluated pointwise, computed with integer
    window sums so the two paths agree exactly.
    """
    m = as_mask(mask)
    h, w = m.shape
    r, s = geom.circle_radius, geom.square_side
    full = Rect(0, 0, h, w)
    rect = full if rect is None else Rect(*rect).clipped(h, w)
    if rect.height <= 0 or rect.width <= 0:
        return np.zeros((max(0, rect.height), max(0, rect.width)))

    margin = max(r, s // 2)
    ex = rect.expanded(margin).clipped(h, w)
    sub = m[ex.top:ex.bottom, ex.left:ex.right].astype(np.int64)

    circ_fg = ndimage.correlate(sub, disk_kernel(r).astype(np.int64),
                                mode="constant", cval=0)
    circ_fg = circ_fg[rect.top - ex.top:rect.bottom - ex.top,
                      rect.left - ex.left:rect.right - ex.left]
    circ_area = _circle_area_field((h, w), r)[rect.top:rect.bottom,
                                              rect.left:rect.right]

    # Square sums from an integral image over the expanded slice; window
    # clipping only ever happens at true image borders because the
    # margin covers the full window reach.
    integral = np.zeros((ex.height + 1, ex.width + 1), dtype=np.int64)
    np.cumsum(np.cumsum(sub, axis=0), axis=1, out=integral[1:, 1:])
    rows = np.arange(rect.top, rect.bottom)
    cols = np.arange(rect.left, rect.right)
    r0 = np.clip(rows - s // 2, 0, h) - ex.top
    r1 = np.clip(rows + (s - s // 2), 0, h) - ex.top
    c0 = np.clip(cols - s // 2, 0, w) - ex.left
    c1 = np.clip(cols + (s - s // 2), 0, w) - ex.left
    sq_fg = (integral[r1[:, None], c1[None, :]]
             - integral[r0[:, None], c1[None, :]]
             - integral[r1[:, None], c0[None, :]]
             + integral[r0[:, None], c0[None, :]])
    sq_area = (r1 - r0)[:, None] * (c1 - c0)[None, :]

    ann_fg = sq_fg - circ_fg
    ann_area = sq_area - circ_area
    inside = np.zeros(circ_fg.shape, dtype=np.float64)
    np.divide(circ_fg, circ_area, out=inside, where=circ_area > 0)
    outside = np.zeros(circ_fg.shape, dtype=np.float64)
    np.divide(ann_fg, ann_area, out=outside, where=ann_area > 0)
    return inside - outside


# Default response threshold. Straight finger strips produce edge "rails"
# scoring up to ~0.36 (circle just inside the strip, square overhanging
# background) and convex palm boundaries score up to ~0.40, while
# fingertip caps peak at 0.55-0.64; 0.48 sits mid-gap.
DEFAULT_SCORE_MIN = 0.48
DEFAULT_GROUP_MIN = 4


def detect_candidates(mask: np.ndarray, hand: HandRegion,
                      geom: CsfGeometry = CsfGeometry(),
                      score_min: float = DEFAULT_SCORE_MIN,
                      group_min: int = DEFAULT_GROUP_MIN,
                      field: np.ndarray | None = None,
                      field_rect: Rect | None = None) -> list[TipCandidate]:
    """Approximate fingertip candidates for one hand.

    Hand pixels whose filter response reaches `score_min` are grouped
    by 8-connectivity; each group of at least `group_min` pixels yields
    one candidate at its centroid (rounded to the nearest pixel,
    snapped onto the group if rounding left it). At most
    MAX_TIPS_PER_HAND candidates are kept, largest groups first. The
    response is always a function of the full mask; `hand` only limits
    which centers may become candidates.

    A precomputed response `field` covering `field_rect` may be shared
    across hands; it must come from csf_response_field on this mask.
    """
    m = as_mask(mask)
    bbox = hand.bbox
    if field is None:
        scores = csf_response_field(m, geom, rect=bbox)
    else:
        fr = Rect(*field_rect)
        if not (fr.top <= bbox.top and fr.left <= bbox.left
                and fr.bottom >= bbox.bottom and fr.right >= bbox.right):
            raise ValueError("shared response field does not cover the hand bbox")
        scores = field[bbox.top - fr.top:bbox.bottom - fr.top,
                       bbox.left - fr.left:bbox.right - fr.left]

    passing = (scores >= score_min) & hand.pixels
    if not passing.any():
        return []
    labels, n = ndimage.label(passing, structure=EIGHT_CONNECTED)
    sizes = np.bincount(labels.ravel(), minlength=n + 1)

    groups = []
    for gid in range(1, n + 1):
        if sizes[gid] < group_min:
            continue
        rows, cols = np.nonzero(labels == gid)
        cr, cc = float(rows.mean()), float(cols.mean())
        approx = Point(_round_half_up(cr) + bbox.top,
                       _round_half_up(cc) + bbox.left)
        if not passing[approx.row - bbox.top, approx.col - bbox.left]:
            # concave group: snap to its nearest member pixel
            d2 = (rows - cr) ** 2 + (cols - cc) ** 2
            order = np.lexsort((cols, rows, d2))
            approx = Point(int(rows[order[0]]) + bbox.top,
                           int(cols[order[0]]) + bbox.left)
        groups.append((int(sizes[gid]), approx))

    groups.sort(key=lambda g: (-g[0], g[1].row, g[1].col))
    return [TipCandidate(approx=p, group_size=sz, hand_ordinal=hand.ordinal)
            for sz, p in groups[:MAX_TIPS_PER_HAND]]


def ccf_orientation(mask: np.ndarray, candidate: TipCandidate,
                    geom: CcfGeometry = CcfGeometry(),
                    radius: int | None = None) -> float:
    """Finger orientation at a candidate, in degrees.

    Among foreground pixels inside the inner circle centered on the
    candidate, the largest 8-connected group is found; the returned
    angle is the direction of the ray from that group's centroid toward
    the candidate, measured CCW from the horizontal (+col) axis.
    `radius` overrides the circle size (callers retry at the filter's
    outer radius when a wide fingertip swallows the inner circle).

    Raises DegenerateNeighborhood when the circle holds no foreground
    or the centroid coincides with the candidate point.
    """
    m = as_mask(mask)
    r = geom.inner_radius if radius is None else radius
    (img_sl, k_sl) = _window_slices(candidate.approx, -r, r + 1, m.shape)
    window = m[img_sl] & disk_kernel(r)[k_sl]
    if not window.any():
        raise DegenerateNeighborhood(
            f"no foreground within the inner circle at {candidate.approx}")

    labels, n = ndimage.label(window, structure=EIGHT_CONNECTED)
    sizes = np.bincount(labels.ravel(), minlength=n + 1)
    sizes[0] = 0
    best = int(sizes.argmax())  # ties: first group in scan order
    rows, cols = np.nonzero(labels == best)
    centroid_row = rows.mean() + img_sl[0].start
    centroid_col = cols.mean() + img_sl[1].start

    d_row = candidate.approx.row - centroid_row
    d_col = candidate.approx.col - centroid_col
    if abs(d_row) < 1e-12 and abs(d_col) < 1e-12:
        raise DegenerateNeighborhood(
            f"centroid coincides with candidate at {candidate.approx}")
    # rows grow downward, so the math-vertical component is -d_row
    return math.degrees(math.atan2(-d_row, d_col)) % 360.0


def ccf_level_score(mask: np.ndarray, center: Point,
                    geom: CcfGeometry = CcfGeometry()) -> int:
    """Diagnostic weighted sum of the concentric filter's level values.

    Foreground pixels score inner_weight inside the inner circle,
    mid_weight between the circles, and outer_weight in the rest of the
    bounding square. Not used by detection; exposed for inspection.
    """
    m = as_mask(mask)
    side = geom.outer_diameter
    ri, ro = geom.inner_radius, geom.outer_diameter // 2
    lo, hi = -(side // 2), side - side // 2
    span = np.arange(lo, hi)
    dr, dc = np.meshgrid(span, span, indexing="ij")
    d2 = dr * dr + dc * dc
    weights = np.full(d2.shape, geom.outer_weight, dtype=np.int64)
    weights[d2 <= ro * ro] = geom.mid_weight
    weights[d2 <= ri * ri] = geom.inner_weight

    (img_sl, k_sl) = _window_slices(center, lo, hi, m.shape)
    return int(weights[k_sl][m[img_sl]].sum())


def refine_tip(mask: np.ndarray, candidate: TipCandidate, theta: float,
               step_r: float = 1.0, max_trace: float = 20.0) -> Fingertip | None:
    """Trace from the candidate along `theta` to the silhouette edge.

    Sub-pixel positions advance by `step_r`; each step's nearest pixel
    is tested against the mask and the last foreground pixel before
    background (or the border) is the exact tip. Returns None when the
    trace runs longer than `max_trace` pixels, which means the
    orientation pointed down the finger instead from the tip and the
    candidate should be dropped.
    """
    m = as_mask(mask)
    h, w = m.shape
    start = candidate.approx
    if not (0 <= start.row < h and 0 <= start.col < w) or not m[start]:
        raise ValueError(f"candidate {start} is not a foreground pixel")
    if step_r <= 0:
        raise ValueError("step_r must be positive")

    rad = math.radians(theta)
    d_row = -math.sin(rad) * step_r
    d_col = math.cos(rad) * step_r

    row, col = float(start.row), float(start.col)
    exact = start
    traced = 0.0
    while True:
        nr, nc = row + d_row, col + d_col
        pr, pc = _round_half_up(nr), _round_half_up(nc)
        if not (0 <= pr < h and 0 <= pc < w) or not m[pr, pc]:
            break
        row, col = nr, nc
        exact = Point(pr, pc)
        traced += step_r
        if traced > max_trace:
            return None

    # walk the remaining pixels so that one step beyond the reported tip
    # is guaranteed background or out of bounds
    while True:
        pr = _round_half_up(exact.row + d_row)
        pc = _round_half_up(exact.col + d_col)
        if (pr, pc) == exact or not (0 <= pr < h and 0 <= pc < w) or not m[pr, pc]:
            break
        exact = Point(pr, pc)
        traced += step_r
        if traced > max_trace:
            return None

    return Fingertip(exact=exact, theta=theta % 360.0,
                     hand_ordinal=candidate.hand_ordinal)
