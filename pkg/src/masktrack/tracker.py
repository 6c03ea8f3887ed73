"""Online per-frame association of detections to tracks.

Each step matches the frame's detections against tracks seen in the previous
frame with a cost of ``2 - mask_iou - feature_similarity``, solved as a
minimum-cost assignment and gated. Tracks that missed the previous frame get
a second chance through short-term retrieval: their box is extrapolated by
robust regression and matched against leftover detections within a distance
gate of twice the object width. Tracks silent for longer than the per-class
memory window are terminated and never matched again.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .assignment import INFEASIBLE, hungarian_solve
from .embedding import (
    FeatureBank,
    bank_similarity,
    bank_update,
    instance_aware_pool,
    spatial_attention,
)
from .errors import InsufficientHistory, MissingFeatures, OutOfOrderFrame
from .geometry import BBox, BinaryMask, bbox_iou, mask_iou
from .regression import huber_fit

CAR = 1
PEDESTRIAN = 2
CLASS_NAMES = {CAR: "car", PEDESTRIAN: "pedestrian"}


def seconds_to_frames(seconds: float, fps: float) -> int:
    """Convert a duration to whole frames, rounding half up, at least 1."""
    return max(1, int(math.floor(seconds * fps + 0.5)))


@dataclass
class TrackerConfig:
    fps: float = 30.0
    n1_seconds: dict[int, float] = field(
        default_factory=lambda: {CAR: 0.1, PEDESTRIAN: 0.2}
    )
    gate_cost: dict[int, float] = field(
        default_factory=lambda: {CAR: 1.7, PEDESTRIAN: 1.7}
    )
    huber_delta: float = 4.0
    huber_window: int = 10
    str_distance_factor: float = 2.0
    bank_size: int = 5
    str_enabled: bool = True

    def n1_frames(self, class_id: int) -> int:
        return seconds_to_frames(self.n1_seconds[class_id], self.fps)


@dataclass
class Detection:
    """One frame-level hypothesis: box, score, mask, appearance features."""

    frame: int
    class_id: int
    score: float
    box: BBox
    mask: BinaryMask
    embedding: np.ndarray | None = None
    feature_map: np.ndarray | None = None

    def resolve_embedding(self) -> np.ndarray:
        """Return the appearance vector, pooling the feature map on demand."""
        if self.embedding is None:
            if self.feature_map is None:
                raise MissingFeatures(
                    f"detection at frame {self.frame} has no embedding or feature map"
                )
            gh, gw = self.feature_map.shape[:2]
            attn = spatial_attention(self.mask, self.box, gh, gw)
            self.embedding = instance_aware_pool(self.feature_map, attn)
        return self.embedding


class TrackState(enum.Enum):
    ACTIVE = "active"
    LOST = "lost"
    TERMINATED = "terminated"


@dataclass
class Track:
    id: int
    class_id: int
    state: TrackState
    history: list[tuple[int, Detection]]
    bank: FeatureBank
    last_matched_frame: int

    @property
    def last_detection(self) -> Detection:
        return self.history[-1][1]

    @property
    def last_box(self) -> BBox:
        return self.last_detection.box

    @property
    def last_mask(self) -> BinaryMask:
        return self.last_detection.mask

    def observe(self, frame: int, det: Detection):
        self.history.append((frame, det))
        self.bank = bank_update(self.bank, det.resolve_embedding(), frame)
        self.last_matched_frame = frame
        self.state = TrackState.ACTIVE


@dataclass
class Observation:
    """One finished-track sample; what downstream stages need per frame."""

    frame: int
    box: BBox
    mask: BinaryMask
    score: float


@dataclass
class Tracklet:
    """A finished track fragment, the unit of offline merging."""

    id: int
    class_id: int
    observations: list[Observation]
    bank: FeatureBank

    def __post_init__(self):
        if not self.observations:
            raise ValueError(f"tracklet {self.id} has no observations")
        frames = [o.frame for o in self.observations]
        if any(b <= a for a, b in zip(frames, frames[1:])):
            raise ValueError(f"tracklet {self.id} frames not strictly increasing")

    @property
    def first_frame(self) -> int:
        return self.observations[0].frame

    @property
    def last_frame(self) -> int:
        return self.observations[-1].frame

    def __len__(self) -> int:
        return len(self.observations)

    @property
    def mean_score(self) -> float:
        return sum(o.score for o in self.observations) / len(self.observations)


# ---------------------------------------------------------------------------
# costs and extrapolation
# ---------------------------------------------------------------------------

def assignment_cost(track: Track, det: Detection) -> float:
    """2 minus mask IOU minus bank similarity; cross-class pairs infeasible."""
    if track.class_id != det.class_id:
        return INFEASIBLE
    iou = mask_iou(track.last_mask, det.mask)
    sim = bank_similarity(track.bank, det.resolve_embedding())
    return 2.0 - iou - sim


def extrapolate_boxes(
    observations: list[tuple[int, BBox]],
    target_frame: int,
    delta: float,
) -> BBox:
    """Evaluate a robust linear fit of top-left motion at ``target_frame``.

    Width and height are copied from the observation nearest to the target.
    Raises InsufficientHistory with fewer than two observations.
    """
    if len(observations) < 2:
        raise InsufficientHistory(f"{len(observations)} observation(s), need 2")
    frames = [f for f, _ in observations]
    sx, ix = huber_fit(frames, [b.x for _, b in observations], delta=delta)
    sy, iy = huber_fit(frames, [b.y for _, b in observations], delta=delta)
    anchor = observations[-1][1] if target_frame >= frames[-1] else observations[0][1]
    return BBox(sx * target_frame + ix, sy * target_frame + iy, anchor.w, anchor.h)


def extrapolate_track(track: Track, target_frame: int, cfg: TrackerConfig) -> BBox:
    """Extrapolated box of a track; falls back to its last box when too short."""
    obs = [(f, det.box) for f, det in track.history[-cfg.huber_window :]]
    try:
        return extrapolate_boxes(obs, target_frame, cfg.huber_delta)
    except InsufficientHistory:
        return track.last_box


def str_match(
    lost_tracks: list[Track],
    detections: list[Detection],
    frame: int,
    cfg: TrackerConfig,
) -> list[tuple[int, int]]:
    """Short-term retrieval: match recently lost tracks to leftover detections.

    Cost combines bank similarity with the IOU of the extrapolated box; a
    pair is feasible only when the detection's top-left lies within
    ``str_distance_factor`` times the track's last observed width of the
    extrapolated top-left. Returns (track_index, detection_index) pairs.
    """
    if not lost_tracks or not detections:
        return []
    costs = np.full((len(lost_tracks), len(detections)), INFEASIBLE)
    for i, track in enumerate(lost_tracks):
        ex_box = extrapolate_track(track, frame, cfg)
        reach = cfg.str_distance_factor * track.last_box.w
        for j, det in enumerate(detections):
            if det.class_id != track.class_id:
                continue
            dist = math.hypot(ex_box.x - det.box.x, ex_box.y - det.box.y)
            if dist > reach:
                continue
            sim = bank_similarity(track.bank, det.resolve_embedding())
            costs[i, j] = 2.0 - sim - bbox_iou(ex_box, det.box)
    pairs = hungarian_solve(costs)
    return [
        (r, c)
        for r, c in pairs
        if costs[r, c] <= cfg.gate_cost[lost_tracks[r].class_id]
    ]


# ---------------------------------------------------------------------------
# the online tracker
# ---------------------------------------------------------------------------

class MaskTracker:
    """Sequential tracker; feed frames in increasing order, then finalize."""

    def __init__(self, config: TrackerConfig):
        self.cfg = config
        self.tracks: list[Track] = []
        self._serials: dict[int, int] = {}
        self._last_frame: int | None = None

    def step(self, frame: int, detections: list[Detection]) -> dict[int, Detection]:
        """Process one frame; returns {track_id: detection} for this frame."""
        if self._last_frame is not None and frame <= self._last_frame:
            raise OutOfOrderFrame(f"frame {frame} after frame {self._last_frame}")
        for det in detections:
            if det.frame != frame:
                raise OutOfOrderFrame(
                    f"detection stamped {det.frame} fed to step({frame})"
                )
        self._refresh_states(frame)
        active = [t for t in self.tracks if t.state is TrackState.ACTIVE]
        lost = [t for t in self.tracks if t.state is TrackState.LOST]

        assigned: dict[int, Detection] = {}
        taken: set[int] = set()

        if active and detections:
            costs = np.array(
                [[assignment_cost(t, d) for d in detections] for t in active]
            )
            for r, c in hungarian_solve(costs):
                if costs[r, c] > self.cfg.gate_cost[active[r].class_id]:
                    continue
                active[r].observe(frame, detections[c])
                assigned[active[r].id] = detections[c]
                taken.add(c)
        # tracks that failed the gate this frame count as unmatched from now on
        for t in active:
            if t.id not in assigned:
                t.state = TrackState.LOST

        leftovers = [d for i, d in enumerate(detections) if i not in taken]
        if self.cfg.str_enabled and lost and leftovers:
            retrieved = str_match(lost, leftovers, frame, self.cfg)
            taken2 = set()
            for r, c in retrieved:
                lost[r].observe(frame, leftovers[c])
                assigned[lost[r].id] = leftovers[c]
                taken2.add(c)
            leftovers = [d for i, d in enumerate(leftovers) if i not in taken2]

        for det in leftovers:
            track = self._spawn(frame, det)
            assigned[track.id] = det

        self._last_frame = frame
        return assigned

    def finalize(self) -> list[Tracklet]:
        """Convert every track ever created into a tracklet, sorted by id."""
        out = []
        for t in sorted(self.tracks, key=lambda t: t.id):
            obs = [
                Observation(f, d.box, d.mask, d.score) for f, d in t.history
            ]
            out.append(Tracklet(t.id, t.class_id, obs, t.bank))
        return out

    def _refresh_states(self, frame: int):
        for t in self.tracks:
            if t.state is TrackState.TERMINATED:
                continue
            missed = frame - t.last_matched_frame - 1
            if missed > self.cfg.n1_frames(t.class_id):
                t.state = TrackState.TERMINATED
            elif missed >= 1:
                t.state = TrackState.LOST
            else:
                t.state = TrackState.ACTIVE

    def _spawn(self, frame: int, det: Detection) -> Track:
        serial = self._serials.get(det.class_id, 0) + 1
        self._serials[det.class_id] = serial
        track = Track(
            id=det.class_id * 1000 + serial,
            class_id=det.class_id,
            state=TrackState.ACTIVE,
            history=[],
            bank=FeatureBank(self.cfg.bank_size),
            last_matched_frame=frame,
        )
        track.observe(frame, det)
        self.tracks.append(track)
        return track
