import numpy as np
import pytest
from helpers import make_det, unit

from masktrack.assignment import INFEASIBLE
from masktrack.embedding import FeatureBank
from masktrack.errors import OutOfOrderFrame
from masktrack.tracker import (
    CAR,
    PEDESTRIAN,
    MaskTracker,
    Track,
    TrackerConfig,
    TrackState,
    assignment_cost,
    extrapolate_track,
    seconds_to_frames,
    str_match,
)


def make_track(track_id, dets, class_id=PEDESTRIAN):
    track = Track(
        id=track_id,
        class_id=class_id,
        state=TrackState.ACTIVE,
        history=[],
        bank=FeatureBank(5),
        last_matched_frame=dets[0].frame,
    )
    for det in dets:
        track.observe(det.frame, det)
    return track


class TestSecondsToFrames:
    def test_rounds_half_up(self):
        assert seconds_to_frames(0.2, 25.0) == 5
        assert seconds_to_frames(0.1, 25.0) == 3  # 2.5 rounds up
        assert seconds_to_frames(0.2, 30.0) == 6

    def test_at_least_one(self):
        assert seconds_to_frames(0.001, 10.0) == 1


class TestAssignmentCost:
    def test_perfect_match_is_zero(self):
        det = make_det(1, 20, 30, unit(0))
        track = make_track(2001, [det])
        same = make_det(2, 20, 30, unit(0))
        assert assignment_cost(track, same) == pytest.approx(0.0, abs=1e-12)

    def test_no_overlap_no_similarity_is_two(self):
        det = make_det(1, 0, 0, unit(0))
        track = make_track(2001, [det])
        far = make_det(2, 100, 60, unit(1))
        assert assignment_cost(track, far) == pytest.approx(2.0, abs=1e-12)

    def test_formula_midpoint(self):
        # half-overlapping boxes of equal size give mask IOU 1/3
        det = make_det(1, 20, 30, unit(0), w=10, h=20)
        track = make_track(2001, [det])
        shifted = make_det(2, 25, 30, unit(0), w=10, h=20)
        cost = assignment_cost(track, shifted)
        assert cost == pytest.approx(2.0 - 1 / 3 - 1.0, abs=1e-12)

    def test_cross_class_infeasible(self):
        det = make_det(1, 20, 30, unit(0))
        track = make_track(2001, [det])
        car = make_det(2, 20, 30, unit(0), class_id=CAR)
        assert assignment_cost(track, car) == INFEASIBLE

    def test_range_bounds(self):
        rng = np.random.default_rng(14)
        det = make_det(1, 20, 30, unit(0))
        track = make_track(2001, [det])
        for _ in range(30):
            emb = rng.normal(size=8)
            other = make_det(
                2, float(rng.integers(0, 150)), float(rng.integers(0, 90)), emb
            )
            cost = assignment_cost(track, other)
            assert 0.0 <= cost <= 3.0


class TestExtrapolateTrack:
    def test_stationary(self):
        dets = [make_det(f, 40, 50, unit(0)) for f in range(1, 6)]
        track = make_track(2001, dets)
        box = extrapolate_track(track, 9, TrackerConfig())
        assert (box.x, box.y) == (pytest.approx(40), pytest.approx(50))
        assert (box.w, box.h) == (10, 20)

    def test_linear_motion_extends(self):
        dets = [make_det(f, 10 + 2 * f, 50, unit(0)) for f in range(1, 6)]
        track = make_track(2001, dets)
        box = extrapolate_track(track, 8, TrackerConfig())
        # moving +2 px/frame, 3 frames past the last observation at f=5
        assert box.x == pytest.approx(10 + 2 * 5 + 6, abs=1e-6)
        assert box.y == pytest.approx(50, abs=1e-6)

    def test_single_observation_falls_back_to_last_box(self):
        det = make_det(1, 33, 44, unit(0))
        track = make_track(2001, [det])
        box = extrapolate_track(track, 7, TrackerConfig())
        assert (box.x, box.y) == (33, 44)


class TestStrMatch:
    def setup_method(self):
        self.cfg = TrackerConfig(fps=25.0)

    def test_exact_position_and_embedding_matched(self):
        dets = [make_det(f, 10 + 2 * f, 50, unit(0)) for f in range(1, 6)]
        track = make_track(2001, dets)
        track.state = TrackState.LOST
        det = make_det(8, 10 + 2 * 8, 50, unit(0))
        assert str_match([track], [det], 8, self.cfg) == [(0, 0)]

    def test_distance_gate_blocks_far_detection(self):
        dets = [make_det(f, 40, 50, unit(0)) for f in range(1, 6)]
        track = make_track(2001, dets)
        # 3 widths away horizontally; identical embedding cannot save it
        det = make_det(8, 40 + 3 * 10, 50, unit(0))
        assert str_match([track], [det], 8, self.cfg) == []

    def test_higher_similarity_wins_on_tie(self):
        left = make_track(2001, [make_det(f, 30, 50, unit(0)) for f in range(1, 4)])
        right = make_track(2002, [make_det(f, 50, 50, unit(1)) for f in range(1, 4)])
        # detection equidistant from both extrapolations, embedding = unit(1)
        det = make_det(6, 40, 50, unit(1))
        matches = str_match([left, right], [det], 6, self.cfg)
        assert matches == [(1, 0)]

    def test_cost_gate_rejects_dissimilar_pair(self):
        # within reach but orthogonal appearance and no box overlap:
        # cost 2 - 0 - 0 = 2 exceeds the assignment gate
        dets = [make_det(f, 40, 50, unit(0)) for f in range(1, 6)]
        track = make_track(2001, dets)
        near = make_det(8, 52, 50, unit(1))
        assert str_match([track], [near], 8, self.cfg) == []


def track_cfg(fps=25.0, **kw):
    return TrackerConfig(fps=fps, **kw)


class TestStep:
    def test_single_track_extends(self):
        tracker = MaskTracker(track_cfg())
        tracker.step(1, [make_det(1, 20, 30, unit(0))])
        tracker.step(2, [make_det(2, 22, 30, unit(0))])
        assert len(tracker.tracks) == 1
        assert len(tracker.tracks[0].history) == 2

    def test_ids_monotonic_per_class(self):
        tracker = MaskTracker(track_cfg())
        out = tracker.step(
            1,
            [
                make_det(1, 20, 30, unit(0)),
                make_det(1, 60, 30, unit(1)),
                make_det(1, 100, 30, unit(2), class_id=CAR, w=20, h=10),
            ],
        )
        assert sorted(out) == [1001, 2001, 2002]

    def test_termination_after_memory_window(self):
        cfg = track_cfg(fps=25.0)  # pedestrian window: 5 frames
        tracker = MaskTracker(cfg)
        tracker.step(1, [make_det(1, 20, 30, unit(0))])
        for f in range(2, 8):
            tracker.step(f, [])
        # 6 missed frames > 5: terminated, a fresh detection spawns a new id
        out = tracker.step(8, [make_det(8, 20, 30, unit(0))])
        assert list(out) == [2002]
        states = {t.id: t.state for t in tracker.tracks}
        assert states[2001] is TrackState.TERMINATED

    def test_gap_within_window_recovered_by_retrieval(self):
        cfg = track_cfg(fps=25.0)
        tracker = MaskTracker(cfg)
        for f in range(1, 4):
            tracker.step(f, [make_det(f, 20, 30, unit(0))])
        for f in range(4, 9):
            tracker.step(f, [])  # 5 missed frames == window: still lost
        out = tracker.step(9, [make_det(9, 20, 30, unit(0))])
        assert list(out) == [2001]
        assert len(tracker.tracks) == 1

    def test_retrieval_disabled_spawns_new_track(self):
        cfg = track_cfg(fps=25.0, str_enabled=False)
        tracker = MaskTracker(cfg)
        for f in range(1, 4):
            tracker.step(f, [make_det(f, 20, 30, unit(0))])
        tracker.step(4, [])
        out = tracker.step(5, [make_det(5, 20, 30, unit(0))])
        assert list(out) == [2002]

    def test_terminated_tracks_never_rematch(self):
        cfg = track_cfg(fps=25.0)
        tracker = MaskTracker(cfg)
        tracker.step(1, [make_det(1, 20, 30, unit(0))])
        for f in range(2, 9):
            tracker.step(f, [])
        for f in range(9, 14):
            tracker.step(f, [make_det(f, 20, 30, unit(0))])
        ids = {t.id for t in tracker.tracks}
        assert ids == {2001, 2002}
        assert len([t for t in tracker.tracks if t.id == 2002][0].history) == 5

    def test_crossing_objects_keep_identities(self):
        # two objects swap sides; masks coincide mid-crossing but the
        # orthogonal embeddings order the costs
        cfg = track_cfg(fps=25.0)
        tracker = MaskTracker(cfg)
        for f in range(1, 12):
            x_a = 20.0 + 4 * (f - 1)
            x_b = 60.0 - 4 * (f - 1)
            tracker.step(
                f,
                [
                    make_det(f, x_a, 30, unit(0)),
                    make_det(f, x_b, 30, unit(1)),
                ],
            )
        tracks = {t.id: t for t in tracker.tracks}
        assert set(tracks) == {2001, 2002}
        # identity A started left and must end right
        assert tracks[2001].history[0][1].box.x == 20.0
        assert tracks[2001].history[-1][1].box.x == 60.0
        assert tracks[2002].history[0][1].box.x == 60.0
        assert tracks[2002].history[-1][1].box.x == 20.0

    def test_one_to_one_assignment_per_frame(self):
        rng = np.random.default_rng(19)
        tracker = MaskTracker(track_cfg())
        for f in range(1, 20):
            dets = [
                make_det(
                    f,
                    float(rng.integers(0, 150)),
                    float(rng.integers(0, 90)),
                    rng.normal(size=8),
                )
                for _ in range(int(rng.integers(0, 5)))
            ]
            out = tracker.step(f, dets)
            assert len(set(out)) == len(out)
        for t in tracker.tracks:
            frames = [f for f, _ in t.history]
            assert frames == sorted(set(frames))

    def test_out_of_order_frame_rejected(self):
        tracker = MaskTracker(track_cfg())
        tracker.step(5, [])
        with pytest.raises(OutOfOrderFrame):
            tracker.step(5, [])
        with pytest.raises(OutOfOrderFrame):
            tracker.step(4, [])

    def test_mis_stamped_detection_rejected(self):
        tracker = MaskTracker(track_cfg())
        with pytest.raises(OutOfOrderFrame):
            tracker.step(2, [make_det(3, 10, 10, unit(0))])

    def test_deterministic_replay(self):
        rng = np.random.default_rng(31)
        frames = []
        for f in range(1, 30):
            frames.append(
                (
                    f,
                    [
                        make_det(
                            f,
                            float(rng.integers(0, 150)),
                            float(rng.integers(0, 90)),
                            rng.normal(size=8),
                        )
                        for _ in range(int(rng.integers(0, 4)))
                    ],
                )
            )

        def run():
            tracker = MaskTracker(track_cfg())
            for f, dets in frames:
                tracker.step(f, dets)
            return [
                (t.id, t.class_id, [(o.frame, o.box) for o in t.observations])
                for t in tracker.finalize()
            ]

        assert run() == run()

    def test_finalize_produces_sorted_tracklets(self):
        tracker = MaskTracker(track_cfg())
        tracker.step(1, [make_det(1, 20, 30, unit(0)), make_det(1, 60, 30, unit(1))])
        tracklets = tracker.finalize()
        assert [t.id for t in tracklets] == [2001, 2002]
        assert all(len(t.observations) == 1 for t in tracklets)
