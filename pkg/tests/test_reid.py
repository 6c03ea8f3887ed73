import numpy as np
import pytest
from helpers import make_tracklet, unit

from masktrack.reid import (
    ReidConfig,
    candidate_pairs,
    merge_pass,
    motion_vector,
    moving_merge_test,
    static_merge_test,
)
from masktrack.tracker import TrackerConfig

FPS = 25.0  # pedestrian long-term window: 25 frames


def line(track_id, frames, x0, y0, vx=0.0, vy=0.0, emb=None):
    positions = [(f, x0 + vx * (f - frames[0]), y0 + vy * (f - frames[0])) for f in frames]
    return make_tracklet(track_id, positions, unit(0) if emb is None else emb)


class TestCandidatePairs:
    def setup_method(self):
        self.cfg = ReidConfig()

    def test_overlapping_frames_excluded(self):
        a = line(2001, range(1, 20), 10, 30)
        b = line(2002, range(17, 40), 10, 30)  # shares frames 17-19
        assert candidate_pairs([a, b], self.cfg, FPS) == []

    def test_gap_beyond_window_excluded(self):
        a = line(2001, range(1, 11), 10, 30)  # ends at 10
        b = line(2002, range(37, 50), 10, 30)  # gap of 26 > 25
        assert candidate_pairs([a, b], self.cfg, FPS) == []

    def test_gap_at_window_included(self):
        a = line(2001, range(1, 11), 10, 30)
        b = line(2002, range(36, 50), 10, 30)  # gap of exactly 25
        assert candidate_pairs([a, b], self.cfg, FPS) == [(0, 1)]

    def test_identical_banks_small_gap_included(self):
        a = line(2001, range(1, 11), 10, 30)
        b = line(2002, range(14, 30), 10, 30)
        assert candidate_pairs([a, b], self.cfg, FPS) == [(0, 1)]

    def test_dissimilar_banks_excluded(self):
        a = line(2001, range(1, 11), 10, 30, emb=unit(0))
        b = line(2002, range(14, 30), 10, 30, emb=unit(1))
        assert candidate_pairs([a, b], self.cfg, FPS) == []

    def test_cross_class_excluded(self):
        a = line(2001, range(1, 11), 10, 30)
        b = line(1001, range(14, 30), 10, 30)
        b.class_id = 1
        assert candidate_pairs([a, b], self.cfg, FPS) == []


class TestMotionVector:
    def test_uniform_motion(self):
        tr = make_tracklet(2001, [(f, float(f - 1), 0.0) for f in range(1, 6)], unit(0))
        vec = motion_vector(tr, "tail", 5)
        assert (vec.mx, vec.my) == (1.0, 0.0)

    def test_stationary(self):
        tr = make_tracklet(2001, [(f, 7.0, 9.0) for f in range(1, 6)], unit(0))
        vec = motion_vector(tr, "head", 5)
        assert (vec.mx, vec.my) == (0.0, 0.0)
        assert vec.confident

    def test_telescoping_hand_case(self):
        tops = [(0, 0), (5, 2), (6, 3), (7, 4), (8, 4)]
        tr = make_tracklet(
            2001, [(f + 1, float(x), float(y)) for f, (x, y) in enumerate(tops)], unit(0)
        )
        vec = motion_vector(tr, "tail", 5)
        assert (vec.mx, vec.my) == (2.0, 1.0)

    def test_telescoping_identity_exact(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            k = int(rng.integers(2, 12))
            xs = rng.integers(0, 50, k).astype(float)
            ys = rng.integers(0, 50, k).astype(float)
            tr = make_tracklet(
                2001,
                [(i + 1, float(xs[i]), float(ys[i])) for i in range(k)],
                unit(0),
            )
            n3 = int(rng.integers(2, 8))
            for end in ("head", "tail"):
                window = xs[:min(n3, k)] if end == "head" else xs[-min(n3, k):]
                wy = ys[:min(n3, k)] if end == "head" else ys[-min(n3, k):]
                vec = motion_vector(tr, end, n3)
                m = len(window)
                assert vec.mx == (window[-1] - window[0]) / (m - 1)
                assert vec.my == (wy[-1] - wy[0]) / (m - 1)

    def test_single_observation_low_confidence(self):
        tr = make_tracklet(2001, [(1, 5.0, 5.0)], unit(0))
        vec = motion_vector(tr, "tail", 5)
        assert (vec.mx, vec.my) == (0.0, 0.0)
        assert not vec.confident


class TestStaticMergeTest:
    def setup_method(self):
        self.cfg = ReidConfig()
        self.tcfg = TrackerConfig(fps=FPS)

    def test_stationary_same_place_merges(self):
        a = line(2001, range(1, 11), 40, 30)
        b = line(2002, range(16, 26), 40, 30)
        assert static_merge_test(a, b, self.cfg, self.tcfg)

    def test_far_apart_rejected(self):
        a = line(2001, range(1, 11), 10, 30)
        b = line(2002, range(16, 26), 10 + 5 * 10, 30)  # 5 widths away
        assert not static_merge_test(a, b, self.cfg, self.tcfg)

    def test_constant_velocity_fragments_merge(self):
        # same line of motion: forward and backward extrapolation coincide
        a = line(2001, range(1, 11), 10, 30, vx=2.0)
        b = line(2002, range(18, 28), 10 + 2.0 * 17, 30, vx=2.0)
        assert static_merge_test(a, b, self.cfg, self.tcfg)

    def test_partial_overlap_thresholds(self):
        # stationary fragments offset by 2px: every gap-frame IOU is
        # (10-2)*20 / ((10+2)*20) = 2/3
        a = line(2001, range(1, 11), 40, 30)
        b = line(2002, range(16, 26), 42, 30)
        assert static_merge_test(a, b, ReidConfig(beta2=0.5), self.tcfg)
        assert not static_merge_test(a, b, ReidConfig(beta2=0.7), self.tcfg)

    def test_adjacent_fragments_compare_directly(self):
        a = line(2001, range(1, 11), 40, 30)
        b = line(2002, range(11, 21), 40, 30)  # no gap frame in between
        assert static_merge_test(a, b, self.cfg, self.tcfg)


class TestMovingMergeTest:
    def setup_method(self):
        self.cfg = ReidConfig()

    def test_parallel_motion_merges(self):
        a = line(2001, range(1, 11), 10, 30, vx=1.0)
        b = line(2002, range(16, 26), 30, 30, vx=1.0)
        assert moving_merge_test(a, b, self.cfg)

    def test_opposite_motion_rejected(self):
        a = line(2001, range(1, 11), 10, 30, vx=1.0)
        b = line(2002, range(16, 26), 60, 30, vx=-1.0)
        assert not moving_merge_test(a, b, self.cfg)

    def test_diagonal_below_beta3_rejected(self):
        # cos((1,0),(1,1)) ~ 0.707 < 0.8
        a = line(2001, range(1, 11), 10, 30, vx=1.0)
        b = line(2002, range(16, 26), 30, 30, vx=1.0, vy=1.0)
        assert not moving_merge_test(a, b, ReidConfig(beta3=0.8))
        assert moving_merge_test(a, b, ReidConfig(beta3=0.7))

    def test_zero_motion_rejected(self):
        a = line(2001, range(1, 11), 10, 30)
        b = line(2002, range(16, 26), 10, 30)
        assert not moving_merge_test(a, b, self.cfg)

    def test_scale_invariance_of_decision(self):
        rng = np.random.default_rng(27)
        for _ in range(50):
            vxa, vya = rng.uniform(-3, 3, 2)
            vxb, vyb = rng.uniform(-3, 3, 2)
            scale = float(rng.uniform(0.1, 10.0))
            a = line(2001, range(1, 11), 60, 50, vx=vxa, vy=vya)
            b = line(2002, range(16, 26), 60, 50, vx=vxb, vy=vyb)
            a2 = line(2001, range(1, 11), 60, 50, vx=scale * vxa, vy=scale * vya)
            b2 = line(2002, range(16, 26), 60, 50, vx=scale * vxb, vy=scale * vyb)
            assert moving_merge_test(a, b, self.cfg) == moving_merge_test(
                a2, b2, self.cfg
            )


class TestMergePass:
    def setup_method(self):
        self.cfg = ReidConfig()
        self.tcfg = TrackerConfig(fps=FPS)

    def test_split_object_reunited(self):
        a = line(2001, range(1, 31), 40, 30)
        b = line(2002, range(43, 70), 40, 30)  # gap 12 ~ half the window
        merged = merge_pass([a, b], self.cfg, self.tcfg, FPS, "static")
        assert [t.id for t in merged] == [2001]
        assert len(merged[0]) == len(a) + len(b)
        assert merged[0].first_frame == 1 and merged[0].last_frame == 69

    def test_distinct_objects_untouched(self):
        a = line(2001, range(1, 31), 10, 20)
        b = line(2002, range(43, 70), 150, 90, emb=unit(1))
        merged = merge_pass([a, b], self.cfg, self.tcfg, FPS, "static")
        assert [t.id for t in merged] == [2001, 2002]

    def test_three_way_chain_converges_to_one_id(self):
        a = line(2001, range(1, 11), 40, 30)
        b = line(2002, range(16, 26), 40, 30)
        c = line(2003, range(31, 41), 40, 30)
        merged = merge_pass([a, b, c], self.cfg, self.tcfg, FPS, "static")
        assert [t.id for t in merged] == [2001]
        assert [o.frame for o in merged[0].observations] == (
            list(range(1, 11)) + list(range(16, 26)) + list(range(31, 41))
        )

    def test_never_merges_overlapping_and_conserves_observations(self):
        rng = np.random.default_rng(33)
        tracklets = []
        next_id = 2001
        for _ in range(12):
            start = int(rng.integers(1, 60))
            length = int(rng.integers(1, 15))
            x = float(rng.integers(0, 9)) * 20.0
            tracklets.append(
                line(
                    next_id,
                    range(start, start + length),
                    x,
                    30,
                    emb=unit(int(x // 20), dim=16),
                )
            )
            next_id += 1
        before = sorted(
            (o.frame, t.class_id, o.box.x, o.box.y)
            for t in tracklets
            for o in t.observations
        )
        merged = merge_pass(tracklets, self.cfg, self.tcfg, FPS, "static")
        assert len(merged) <= len(tracklets)
        after = sorted(
            (o.frame, t.class_id, o.box.x, o.box.y)
            for t in merged
            for o in t.observations
        )
        assert before == after  # observation multiset conserved
        for t in merged:
            frames = [o.frame for o in t.observations]
            assert frames == sorted(frames)
            assert len(frames) == len(set(frames))

    def test_deterministic(self):
        tracklets = [
            line(2001, range(1, 11), 40, 30),
            line(2002, range(16, 26), 40, 30),
            line(2003, range(31, 41), 40, 30),
            line(2004, range(16, 26), 120, 70, emb=unit(1)),
        ]
        def run():
            out = merge_pass(tracklets, self.cfg, self.tcfg, FPS, "static")
            return [(t.id, len(t)) for t in out]

        assert run() == run()

    def test_bad_camera_mode_rejected(self):
        with pytest.raises(ValueError):
            merge_pass([], self.cfg, self.tcfg, FPS, "auto")
