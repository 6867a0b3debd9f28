"""Parametric hand renderer with exact ground truth.

Hands are drawn as a palm disk plus capsule-shaped fingers (strips with
semicircular caps, so the separability filter sees the same boundary
shape as a real fingertip). A bent finger keeps its base direction but
its tip moves radially closer to the palm center following the same
distance model the estimator inverts, which makes rendered frames a
closed-loop oracle: the ground-truth angle of finger with bend a1 is
exactly 180 - a1.

The nominal tip of a finger is the cap center, placed at distance
d = d_straight/3 + (2*d_straight/3) * (1 - a1/90)
from the palm center, where d_straight is the palm-center-to-tip
distance of the straight finger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import SpecOverflow
from .image import as_rgb_image

DEFAULT_SKIN = (205, 140, 110)
DEFAULT_BACKGROUND = (60, 70, 110)

# Two-hand layout that fits 240x230 with every finger still visible at
# full bend: finger width must clear the separability filter's shaft
# response, which forces wide fingers and in turn limits each hand to
# three of them at this resolution.
BASELINE_SIZE = (240, 230)  # (width, height)
_PALM_RADIUS = 29.0
_FINGER_WIDTH = 15.5
_STRAIGHT_LENGTH = 73.0
_BASE_ANGLES = (60.0, 90.0, 120.0)
_PALM_ROW = 119.0
_LEFT_PALM_COL = 59.5
_RIGHT_PALM_COL = 180.5


@dataclass(frozen=True)
class FingerSpec:
    """One finger: where it leaves the palm circle and how bent it is."""

    base_angle: float  # degrees CCW from +col, 90 points up
    width: float
    straight_length: float  # beyond the palm rim when straight
    bend_a1: float = 0.0

    def __post_init__(self):
        if self.width <= 0 or self.straight_length <= 0:
            raise ValueError("finger width and length must be positive")
        if not 0.0 <= self.bend_a1 <= 90.0:
            raise ValueError(f"bend must lie in [0, 90], got {self.bend_a1}")


@dataclass(frozen=True)
class HandSpec:
    """A palm disk with non-overlapping radial fingers."""

    palm_center: tuple[float, float]  # (row, col)
    palm_radius: float
    fingers: tuple[FingerSpec, ...] = ()
    skin_rgb: tuple[int, int, int] = DEFAULT_SKIN
    background_rgb: tuple[int, int, int] = DEFAULT_BACKGROUND

    def __post_init__(self):
        if self.palm_radius < 15.0:
            raise ValueError("palm radius must be at least 15 px")

    def d_straight(self, finger: FingerSpec) -> float:
        return self.palm_radius + finger.straight_length

    def tip_distance(self, finger: FingerSpec) -> float:
        ds = self.d_straight(finger)
        return ds / 3.0 + (2.0 * ds / 3.0) * (1.0 - finger.bend_a1 / 90.0)

    def tip_point(self, finger: FingerSpec) -> tuple[float, float]:
        d = self.tip_distance(finger)
        rad = math.radians(finger.base_angle)
        return (self.palm_center[0] - d * math.sin(rad),
                self.palm_center[1] + d * math.cos(rad))


@dataclass(frozen=True)
class FingerTruth:
    """Ground truth for one rendered finger."""

    tip: tuple[float, float]
    d: float
    d_straight: float
    a1: float
    a2: float
    visible: bool


@dataclass(frozen=True)
class HandTruth:
    """Ground truth for one rendered hand, fingers left to right."""

    cop: tuple[float, float]
    fingers: tuple[FingerTruth, ...]

    @property
    def tips(self) -> tuple[tuple[float, float], ...]:
        return tuple(f.tip for f in self.fingers)

    @property
    def a2(self) -> tuple[float, ...]:
        return tuple(f.a2 for f in self.fingers)


def _disk_mask(shape, center, radius) -> np.ndarray:
    h, w = shape
    rr, cc = np.ogrid[:h, :w]
    return ((rr - center[0]) ** 2 + (cc - center[1]) ** 2) <= radius * radius


def _capsule_mask(shape, a, b, radius) -> np.ndarray:
    """Pixels whose centers lie within `radius` of segment [a, b]."""
    h, w = shape
    r0 = max(0, math.floor(min(a[0], b[0]) - radius))
    r1 = min(h, math.ceil(max(a[0], b[0]) + radius) + 1)
    c0 = max(0, math.floor(min(a[1], b[1]) - radius))
    c1 = min(w, math.ceil(max(a[1], b[1]) + radius) + 1)
    out = np.zeros(shape, dtype=bool)
    if r0 >= r1 or c0 >= c1:
        return out
    rr, cc = np.mgrid[r0:r1, c0:c1]
    vr, vc = b[0] - a[0], b[1] - a[1]
    denom = vr * vr + vc * vc
    if denom == 0.0:
        d2 = (rr - a[0]) ** 2 + (cc - a[1]) ** 2
    else:
        t = np.clip(((rr - a[0]) * vr + (cc - a[1]) * vc) / denom, 0.0, 1.0)
        d2 = (rr - (a[0] + t * vr)) ** 2 + (cc - (a[1] + t * vc)) ** 2
    out[r0:r1, c0:c1] = d2 <= radius * radius
    return out


def _check_bounds(spec: HandSpec, shape) -> None:
    h, w = shape
    points = [(spec.palm_center, spec.palm_radius)]
    for f in spec.fingers:
        points.append((spec.tip_point(f), f.width / 2.0))
    for (pr, pc), r in points:
        # pixel centers are the integer grid: index floor(p + r) must exist
        if pr - r <= -1 or pr + r >= h or pc - r <= -1 or pc + r >= w:
            raise SpecOverflow(
                f"geometry reaches ({pr:.1f}, {pc:.1f})+-{r:.1f} outside "
                f"a {h}x{w} image")


def render_silhouette(spec: HandSpec, size=BASELINE_SIZE) -> np.ndarray:
    """Rasterize the hand as a boolean mask. `size` is (width, height)."""
    shape = (size[1], size[0])
    _check_bounds(spec, shape)
    sil = _disk_mask(shape, spec.palm_center, spec.palm_radius)
    near_palm = _disk_mask(shape, spec.palm_center, spec.palm_radius + 1.5)
    finger_masks = []
    embed = min(4.0, spec.palm_radius / 2.0)
    rim = spec.palm_radius - embed
    for f in spec.fingers:
        rad = math.radians(f.base_angle)
        base = (spec.palm_center[0] - rim * math.sin(rad),
                spec.palm_center[1] + rim * math.cos(rad))
        capsule = _capsule_mask(shape, base, spec.tip_point(f), f.width / 2.0)
        finger_masks.append(capsule & ~near_palm)
        sil |= capsule
    for i in range(len(finger_masks)):
        for j in range(i + 1, len(finger_masks)):
            if (finger_masks[i] & finger_masks[j]).any():
                raise ValueError(
                    f"fingers {i} and {j} overlap outside the palm")
    return sil


def _truth(spec: HandSpec, sil: np.ndarray) -> HandTruth:
    palm = _disk_mask(sil.shape, spec.palm_center, spec.palm_radius)
    fingers = []
    for f in spec.fingers:
        tip = spec.tip_point(f)
        d = spec.tip_distance(f)
        # a finger is observable only if enough of it sticks out of the palm
        rad = math.radians(f.base_angle)
        embed = min(4.0, spec.palm_radius / 2.0)
        base = (spec.palm_center[0] - (spec.palm_radius - embed) * math.sin(rad),
                spec.palm_center[1] + (spec.palm_radius - embed) * math.cos(rad))
        capsule = _capsule_mask(sil.shape, base, tip, f.width / 2.0)
        outside = int(np.count_nonzero(capsule & ~palm))
        fingers.append(FingerTruth(
            tip=tip, d=d, d_straight=spec.d_straight(f), a1=f.bend_a1,
            a2=180.0 - f.bend_a1, visible=outside >= 20))
    fingers.sort(key=lambda ft: (ft.tip[1], ft.tip[0]))
    return HandTruth(cop=spec.palm_center, fingers=tuple(fingers))


def render(spec: HandSpec, size=BASELINE_SIZE):
    """Render one hand. Returns (rgb image, HandTruth).

    `size` is (width, height). Colors are flat (no anti-aliasing), so
    segmenting with bounds containing skin_rgb reproduces the
    silhouette pixel for pixel.
    """
    sil = render_silhouette(spec, size)
    image = _colorize(sil, spec.skin_rgb, spec.background_rgb)
    return image, _truth(spec, sil)


def _colorize(sil, skin_rgb, background_rgb) -> np.ndarray:
    image = np.empty(sil.shape + (3,), dtype=np.uint8)
    image[:] = np.asarray(background_rgb, dtype=np.uint8)
    image[sil] = np.asarray(skin_rgb, dtype=np.uint8)
    return as_rgb_image(image)


def render_scene(specs, size=BASELINE_SIZE):
    """Compose several hands into one frame.

    Returns (rgb image, truths) with truths ordered the way the
    pipeline orders hands: by leftmost silhouette column. Hands must
    not touch and must share a background color.
    """
    specs = list(specs)
    if not specs:
        raise ValueError("at least one hand spec is required")
    if any(s.background_rgb != specs[0].background_rgb for s in specs):
        raise ValueError("all hands in a scene must share a background")
    sils = [render_silhouette(s, size) for s in specs]
    for i in range(len(sils)):
        for j in range(i + 1, len(sils)):
            # one blank column between blobs keeps 8-connectivity apart
            if (_dilate1(sils[i]) & sils[j]).any():
                raise ValueError(f"hands {i} and {j} touch")

    combined = np.zeros_like(sils[0])
    for s in sils:
        combined |= s
    image = _colorize(combined, specs[0].skin_rgb, specs[0].background_rgb)

    order = sorted(range(len(specs)),
                   key=lambda i: int(np.nonzero(sils[i].any(axis=0))[0][0]))
    truths = tuple(_truth(specs[i], sils[i]) for i in order)
    return image, truths


def _dilate1(mask: np.ndarray) -> np.ndarray:
    out = mask.copy()
    out[:-1] |= mask[1:]
    out[1:] |= mask[:-1]
    out[:, :-1] |= mask[:, 1:]
    out[:, 1:] |= mask[:, :-1]
    out[:-1, :-1] |= mask[1:, 1:]
    out[1:, 1:] |= mask[:-1, :-1]
    out[:-1, 1:] |= mask[1:, :-1]
    out[1:, :-1] |= mask[:-1, 1:]
    return out


def standard_hand(side: str, a1_values=(0.0, 0.0, 0.0)) -> HandSpec:
    """One hand of the standard two-hand layout ('left' or 'right')."""
    if len(a1_values) != len(_BASE_ANGLES):
        raise ValueError(f"expected {len(_BASE_ANGLES)} bend values")
    col = _LEFT_PALM_COL if side == "left" else _RIGHT_PALM_COL
    fingers = tuple(
        FingerSpec(base_angle=ang, width=_FINGER_WIDTH,
                   straight_length=_STRAIGHT_LENGTH, bend_a1=float(a1))
        for ang, a1 in zip(_BASE_ANGLES, a1_values))
    return HandSpec(palm_center=(_PALM_ROW, col), palm_radius=_PALM_RADIUS,
                    fingers=fingers)


def two_hand_scene(a1_left=(0.0, 0.0, 0.0), a1_right=(0.0, 0.0, 0.0),
                   size=BASELINE_SIZE):
    """Standard two-hand frame; bends given per finger, left to right.

    Bend values are listed in base-angle order, which for this layout
    coincides with right-to-left tip order on each hand; truths come
    back left-to-right as the pipeline will see them.
    """
    return render_scene([standard_hand("left", a1_left),
                         standard_hand("right", a1_right)], size)


def eight_finger_scene(a1_left=(0.0,) * 4, a1_right=(0.0,) * 4,
                       size=BASELINE_SIZE):
    """Two four-finger hands for missing/extra-finger association tests.

    Bends above ~60 degrees are rejected: with four fingers per hand the
    shorter layout cannot keep deeply bent tips clear of the palm.
    """
    for vals in (a1_left, a1_right):
        if len(vals) != 4:
            raise ValueError("expected 4 bend values per hand")
        if any(a > 60.0 for a in vals):
            raise ValueError("four-finger layout supports bends up to 60")
    angles = (43.5, 74.5, 105.5, 136.5)
    specs = []
    for col, vals in ((_LEFT_PALM_COL, a1_left), (_RIGHT_PALM_COL, a1_right)):
        fingers = tuple(
            FingerSpec(base_angle=ang, width=_FINGER_WIDTH,
                       straight_length=41.0, bend_a1=float(a1))
            for ang, a1 in zip(angles, vals))
        specs.append(HandSpec(palm_center=(_PALM_ROW, col),
                              palm_radius=_PALM_RADIUS, fingers=fingers))
    return render_scene(specs, size)


def five_finger_hand(size=BASELINE_SIZE):
    """A single splayed five-finger hand, all fingers straight."""
    angles = (28.0, 59.0, 90.0, 121.0, 152.0)
    fingers = tuple(FingerSpec(base_angle=a, width=_FINGER_WIDTH,
                               straight_length=41.0) for a in angles)
    spec = HandSpec(palm_center=(115.0, 120.0), palm_radius=_PALM_RADIUS,
                    fingers=fingers)
    return render(spec, size)


def fist_scene(size=BASELINE_SIZE):
    """A single hand with no visible fingers."""
    spec = HandSpec(palm_center=(115.0, 120.0), palm_radius=34.0)
    return render(spec, size)


def corpus_frames(n_frames: int, seed: int = 1234, size=BASELINE_SIZE):
    """Yield (frame_id, image, truths) for the standard bending corpus.

    Frame 0 is the open-hand reference (all bends zero); subsequent
    frames draw each finger's bend uniformly from [0, 90]. The layout
    keeps every finger visible across the whole bend range.
    """
    rng = np.random.default_rng(seed)
    image, truths = two_hand_scene()
    yield 0, image, truths
    for i in range(1, n_frames + 1):
        bends = rng.uniform(0.0, 90.0, size=6)
        image, truths = two_hand_scene(tuple(bends[:3]), tuple(bends[3:]),
                                       size=size)
        yield i, image, truths
