"""Offline recovery of identities split by long occlusion.

Tracklet pairs that do not overlap in time, sit close enough in time, and
look alike are re-connected when their motion agrees. Static cameras bridge
the gap geometrically: both fragments are extrapolated into the gap and must
overlap on average. Moving cameras compare mean top-left displacement
vectors by cosine instead, since extrapolated positions drift with the ego
motion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .embedding import bank_cross_similarity, merge_banks
from .errors import InsufficientHistory
from .geometry import bbox_iou
from .tracker import (
    CAR,
    PEDESTRIAN,
    Tracklet,
    TrackerConfig,
    extrapolate_boxes,
    seconds_to_frames,
)

CAMERA_MODES = ("static", "moving")


@dataclass
class ReidConfig:
    n2_seconds: dict[int, float] = field(
        default_factory=lambda: {CAR: 0.5, PEDESTRIAN: 1.0}
    )
    n3_frames: int = 5
    beta1: float = 0.6
    beta2: float = 0.5
    beta3: float = 0.8
    camera_mode: str = "auto"
    enabled: bool = True

    def n2_frames(self, class_id: int, fps: float) -> int:
        return seconds_to_frames(self.n2_seconds[class_id], fps)


@dataclass(frozen=True)
class MotionVector:
    """Mean per-frame top-left displacement over a tracklet end."""

    mx: float
    my: float
    confident: bool = True

    @property
    def magnitude(self) -> float:
        return math.hypot(self.mx, self.my)


def motion_vector(tracklet: Tracklet, end: str, n3: int) -> MotionVector:
    """Mean consecutive displacement over the first or last ``n3`` frames.

    ``end`` is 'head' or 'tail'. A single-observation tracklet yields the
    zero vector flagged as low-confidence.
    """
    if end == "head":
        window = tracklet.observations[: min(n3, len(tracklet))]
    elif end == "tail":
        window = tracklet.observations[-min(n3, len(tracklet)) :]
    else:
        raise ValueError(f"end must be 'head' or 'tail', got {end!r}")
    if len(window) < 2:
        return MotionVector(0.0, 0.0, confident=False)
    xs = np.array([o.box.x for o in window])
    ys = np.array([o.box.y for o in window])
    return MotionVector(float(np.mean(np.diff(xs))), float(np.mean(np.diff(ys))))


def candidate_pairs(
    tracklets: list[Tracklet], cfg: ReidConfig, fps: float
) -> list[tuple[int, int]]:
    """Ordered index pairs (u, v) eligible for merging.

    u must end before v starts, the gap must fit in the per-class long-term
    window, and the banks must look alike (max pairwise cosine above beta1).
    """
    pairs = []
    for i, u in enumerate(tracklets):
        for j, v in enumerate(tracklets):
            if i == j or u.class_id != v.class_id:
                continue
            if u.last_frame >= v.first_frame:
                continue
            gap = v.first_frame - u.last_frame - 1
            if gap > cfg.n2_frames(u.class_id, fps):
                continue
            if bank_cross_similarity(u.bank, v.bank) <= cfg.beta1:
                continue
            pairs.append((i, j))
    return pairs


def static_merge_test(
    u: Tracklet, v: Tracklet, cfg: ReidConfig, tracker_cfg: TrackerConfig
) -> bool:
    """Do forward and backward extrapolations overlap across the gap?

    Every gap frame gets u extrapolated forward and v backward; the mean box
    IOU must exceed beta2. Adjacent tracklets compare u's last box with v's
    first directly.
    """
    gap_frames = range(u.last_frame + 1, v.first_frame)
    if not gap_frames:
        return bbox_iou(u.observations[-1].box, v.observations[0].box) > cfg.beta2
    u_obs = [(o.frame, o.box) for o in u.observations[-tracker_cfg.huber_window :]]
    v_obs = [(o.frame, o.box) for o in v.observations[: tracker_cfg.huber_window]]
    ious = []
    for f in gap_frames:
        try:
            bu = extrapolate_boxes(u_obs, f, tracker_cfg.huber_delta)
        except InsufficientHistory:
            bu = u.observations[-1].box
        try:
            bv = extrapolate_boxes(v_obs, f, tracker_cfg.huber_delta)
        except InsufficientHistory:
            bv = v.observations[0].box
        ious.append(bbox_iou(bu, bv))
    return float(np.mean(ious)) > cfg.beta2


def moving_merge_test(u: Tracklet, v: Tracklet, cfg: ReidConfig) -> bool:
    """Do the two fragments move the same way?

    Compares u's tail motion with v's head motion by cosine; requires a
    positive value above beta3. Zero-magnitude vectors have no direction and
    reject the pair.
    """
    mu = motion_vector(u, "tail", cfg.n3_frames)
    mv = motion_vector(v, "head", cfg.n3_frames)
    if mu.magnitude == 0.0 or mv.magnitude == 0.0:
        return False
    cos = (mu.mx * mv.mx + mu.my * mv.my) / (mu.magnitude * mv.magnitude)
    return cos > max(0.0, cfg.beta3)


def _stitch(parts: list[Tracklet]) -> Tracklet:
    merged = parts[0]
    for nxt in parts[1:]:
        merged = Tracklet(
            id=merged.id,
            class_id=merged.class_id,
            observations=merged.observations + nxt.observations,
            bank=merge_banks(merged.bank, nxt.bank),
        )
    return merged


def merge_pass(
    tracklets: list[Tracklet],
    cfg: ReidConfig,
    tracker_cfg: TrackerConfig,
    fps: float,
    camera_mode: str,
) -> list[Tracklet]:
    """Greedily merge candidate pairs until none passes.

    Candidates are taken in order of descending feature similarity; each
    tracklet gives away its tail and its head at most once per pass.
    Accepted links are stitched (chains included), keeping the earlier id,
    and the whole procedure repeats on the merged set until it is stable.
    """
    if camera_mode not in CAMERA_MODES:
        raise ValueError(f"camera_mode must be one of {CAMERA_MODES}, got {camera_mode!r}")
    current = sorted(tracklets, key=lambda t: t.id)
    while True:
        cands = []
        for i, j in candidate_pairs(current, cfg, fps):
            sim = bank_cross_similarity(current[i].bank, current[j].bank)
            cands.append((-sim, current[i].id, current[j].id, i, j))
        cands.sort()
        tail_used: set[int] = set()
        head_used: set[int] = set()
        links: dict[int, int] = {}
        for _, _, _, i, j in cands:
            if i in tail_used or j in head_used:
                continue
            if camera_mode == "static":
                ok = static_merge_test(current[i], current[j], cfg, tracker_cfg)
            else:
                ok = moving_merge_test(current[i], current[j], cfg)
            if ok:
                links[i] = j
                tail_used.add(i)
                head_used.add(j)
        if not links:
            return current
        merged_away = set(links.values())
        result = []
        for idx, tr in enumerate(current):
            if idx in merged_away:
                continue
            if idx in links:
                chain = [tr]
                k = idx
                while k in links:
                    k = links[k]
                    chain.append(current[k])
                result.append(_stitch(chain))
            else:
                result.append(tr)
        current = sorted(result, key=lambda t: t.id)
