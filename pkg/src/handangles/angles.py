"""Bend-angle geometry against an open-hand reference frame.

A reference frame with all fingers straight fixes, per finger, the
maximal fingertip-to-palm distance d_ref. As a finger bends, its
observed distance d shrinks; the bend is mapped linearly so that
d = d_ref is straight (a1 = 0) and d = d_ref/3 is the 90-degree limit
beyond which a tip no longer shows up in the silhouette. The reported
joint angle is a2 = 180 - a1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyObservation, InvalidReference, NoReference
from .fingertips import Fingertip
from .image import Point


@dataclass(frozen=True)
class HandObservation:
    """One hand in one frame: palm center plus left-to-right fingertips."""

    hand_ordinal: int
    cop: Point
    fingertips: tuple[Fingertip, ...]
    frame_id: int | str | None = None

    def __post_init__(self):
        if len(self.fingertips) > 5:
            raise ValueError("a hand cannot carry more than 5 fingertips")
        keys = [(t.exact.col, t.exact.row) for t in self.fingertips]
        if keys != sorted(keys):
            raise ValueError("fingertips must be ordered by column, ties by row")

    def tip_distances(self) -> tuple[float, ...]:
        return tuple(math.hypot(t.exact.row - self.cop.row,
                                t.exact.col - self.cop.col)
                     for t in self.fingertips)


def observation_from_tips(hand_ordinal: int, cop: Point,
                          tips, frame_id=None) -> HandObservation:
    """Build an observation, sorting tips into left-to-right order."""
    ordered = tuple(sorted(tips, key=lambda t: (t.exact.col, t.exact.row)))
    return HandObservation(hand_ordinal=hand_ordinal, cop=cop,
                           fingertips=ordered, frame_id=frame_id)


@dataclass(frozen=True)
class HandReference:
    """Per-finger reference distances for one hand, left to right."""

    d_ref: tuple[float, ...]
    cop: Point

    @property
    def finger_count(self) -> int:
        return len(self.d_ref)


@dataclass(frozen=True)
class ReferenceModel:
    """Reference distances per hand ordinal, captured once and read-only."""

    hands: dict[int, HandReference]
    frame_id: int | str | None = None

    def for_hand(self, ordinal: int) -> HandReference:
        try:
            return self.hands[ordinal]
        except KeyError:
            raise NoReference(f"no reference captured for hand {ordinal}") from None


@dataclass(frozen=True)
class FingerAngle:
    """Angles for one matched finger.

    a1 is the bend away from straight in [0, 90]; a2 = 180 - a1 is the
    reported joint angle. `clamped` marks distances outside the
    [d_ref/3, d_ref] measurement range that were pinned to the limit.
    """

    finger_index: int
    d: float
    a1: float
    a2: float
    clamped: bool = False


@dataclass(frozen=True)
class HandReport:
    """Angles for one hand plus its palm displacement since reference.

    `absent` lists reference fingers with no visible tip this frame;
    their bend exceeded the 90-degree detectability limit, so they
    carry no measured angle.
    """

    hand_ordinal: int
    cop: Point
    cop_delta: tuple[int, int]
    angles: tuple[FingerAngle, ...]
    absent: tuple[int, ...] = ()


@dataclass(frozen=True)
class AngleReport:
    """Per-frame report for all observed hands, in ordinal order."""

    frame_id: int | str | None
    hands: tuple[HandReport, ...] = ()

    @property
    def total_angles(self) -> int:
        return sum(len(h.angles) for h in self.hands)


def bend_angle(d: float, d_ref: float, finger_index: int = 0) -> FingerAngle:
    """Map a fingertip-to-palm distance to its finger bend angles.

    Linear in d with exact endpoints: d >= d_ref gives a1 = 0 and
    d <= d_ref/3 gives a1 = 90; distances outside that interval are
    clamped and flagged. a1 + a2 = 180 exactly.
    """
    if d_ref <= 0.0:
        raise InvalidReference(f"reference distance must be positive, got {d_ref}")
    if d < 0.0:
        raise ValueError(f"distance must be non-negative, got {d}")
    third = d_ref / 3.0
    clamped = d < third or d > d_ref
    dc = min(max(d, third), d_ref)
    # algebraically 90 - ((dc - third) / (2*d_ref/3)) * 90, arranged so
    # both endpoints evaluate exactly
    a1 = 90.0 * (d_ref - dc) / (d_ref - third)
    a2 = 180.0 - a1
    return FingerAngle(finger_index=finger_index, d=d, a1=a1, a2=a2,
                       clamped=clamped)


def capture_reference(observations, frame_id=None) -> ReferenceModel:
    """Record per-finger reference distances from an open-hand frame.

    Every observed hand must show at least one fingertip; the captured
    distances are maximal by protocol (fingers straight, a2 = 180).
    """
    hands: dict[int, HandReference] = {}
    for obs in observations:
        if not obs.fingertips:
            raise EmptyObservation(
                f"hand {obs.hand_ordinal} shows no fingertips; cannot "
                "seed a reference")
        hands[obs.hand_ordinal] = HandReference(d_ref=obs.tip_distances(),
                                                cop=obs.cop)
    return ReferenceModel(hands=hands, frame_id=frame_id)


def associate_fingers(obs: HandObservation,
                      ref: ReferenceModel) -> list[tuple[int, float]]:
    """Match observed fingertips to reference fingers, order preserved.

    Returns (finger_index, distance) pairs with strictly increasing
    finger indices, chosen among all order-preserving assignments to
    minimize the total |d - d_ref| deviation (ties resolved toward the
    leftmost reference fingers). With equal counts this is positional
    matching; missing fingers leave their reference index unmatched.
    """
    hand_ref = ref.for_hand(obs.hand_ordinal)
    distances = obs.tip_distances()
    if not distances:
        return []
    if len(distances) <= len(hand_ref.d_ref):
        pairing = _align(distances, hand_ref.d_ref)
        return [(j, distances[i]) for i, j in pairing]
    # more observed tips than reference fingers: every reference finger
    # takes one tip, surplus tips are ignored
    pairing = _align(hand_ref.d_ref, distances)
    return [(i, distances[j]) for i, j in pairing]


def _align(short, long) -> list[tuple[int, int]]:
    """Min-cost order-preserving injection of `short` into `long`.

    Returns (short index, long index) pairs. Among equal-cost
    assignments the lexicographically smallest tuple of long indices is
    chosen, via suffix costs and a forward greedy walk.
    """
    m, n = len(short), len(long)
    inf = math.inf
    # suffix[i][j]: cost of matching short[i:] into long[j:]
    suffix = [[inf] * (n + 1) for _ in range(m + 1)]
    suffix[m] = [0.0] * (n + 1)
    for i in range(m - 1, -1, -1):
        for j in range(n - (m - i), -1, -1):
            take = abs(short[i] - long[j]) + suffix[i + 1][j + 1]
            skip = suffix[i][j + 1]
            suffix[i][j] = take if take <= skip else skip

    pairs = []
    j = 0
    for i in range(m):
        while suffix[i][j] < abs(short[i] - long[j]) + suffix[i + 1][j + 1]:
            j += 1
        pairs.append((i, j))
        j += 1
    return pairs


def report(observations, ref: ReferenceModel, frame_id=None) -> AngleReport:
    """Angle report for one frame's observations against the reference.

    Hands appear in ordinal order. A hand with no captured reference is
    reported with its palm center only. Arm movement is tolerated
    because distances are palm-relative; the palm displacement since
    the reference frame is reported per hand.
    """
    obs_list = sorted(observations, key=lambda o: o.hand_ordinal)
    if obs_list and not any(o.hand_ordinal in ref.hands for o in obs_list):
        raise NoReference("no observed hand has a captured reference")

    hand_reports = []
    for obs in obs_list:
        try:
            hand_ref = ref.for_hand(obs.hand_ordinal)
        except NoReference:
            hand_reports.append(HandReport(
                hand_ordinal=obs.hand_ordinal, cop=obs.cop,
                cop_delta=(0, 0), angles=(), absent=()))
            continue
        matched = associate_fingers(obs, ref)
        angles = tuple(bend_angle(d, hand_ref.d_ref[i], finger_index=i)
                       for i, d in matched)
        matched_ids = {i for i, _ in matched}
        absent = tuple(i for i in range(hand_ref.finger_count)
                       if i not in matched_ids)
        delta = (obs.cop.row - hand_ref.cop.row,
                 obs.cop.col - hand_ref.cop.col)
        hand_reports.append(HandReport(
            hand_ordinal=obs.hand_ordinal, cop=obs.cop, cop_delta=delta,
            angles=angles, absent=absent))
    return AngleReport(frame_id=frame_id, hands=tuple(hand_reports))
