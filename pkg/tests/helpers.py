"""Small builders shared by the tracking-level tests."""

import numpy as np

from masktrack.embedding import FeatureBank, bank_update
from masktrack.formats import SequenceMeta
from masktrack.geometry import BBox, rect_mask
from masktrack.tracker import PEDESTRIAN, Detection, Observation, Tracklet

IMG_H, IMG_W = 120, 200


def unit(idx, dim=8):
    v = np.zeros(dim)
    v[idx] = 1.0
    return v


def make_det(frame, x, y, emb, class_id=PEDESTRIAN, score=0.9, w=10.0, h=20.0):
    box = BBox(x, y, w, h)
    return Detection(
        frame=frame,
        class_id=class_id,
        score=score,
        box=box,
        mask=rect_mask(IMG_H, IMG_W, box),
        embedding=np.asarray(emb, dtype=float),
    )


def make_meta(name="seq", fps=25.0, camera_mode="static"):
    return SequenceMeta(name, fps, IMG_H, IMG_W, camera_mode)


def make_tracklet(track_id, positions, emb, class_id=PEDESTRIAN, score=0.9, w=10.0, h=20.0):
    """positions: list of (frame, x, y)."""
    obs = []
    bank = FeatureBank(5)
    for frame, x, y in positions:
        box = BBox(x, y, w, h)
        obs.append(Observation(frame, box, rect_mask(IMG_H, IMG_W, box), score))
        bank = bank_update(bank, np.asarray(emb, dtype=float), frame)
    return Tracklet(track_id, class_id, obs, bank)
