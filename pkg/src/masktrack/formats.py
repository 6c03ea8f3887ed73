"""Sequence I/O: detection files, result files, overlay images.

Detections arrive as JSON lines, one object per line, after a single header
line carrying the sequence facts (name, fps, image size, camera mode).
Results use the plain text layout common to mask-level tracking benchmarks:
``frame track_id class_id img_h img_w rle`` per line, frames ascending, with
same-frame masks guaranteed pairwise disjoint on write (overlaps lose to the
lower track id).
"""

from __future__ import annotations

import colorsys
import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    CountsSumMismatch,
    DimMismatch,
    MalformedToken,
    MaskDimMismatch,
    MissingFeatures,
    OverlapAfterResolution,
    ParseError,
)
from .geometry import (
    BBox,
    BinaryMask,
    mask_merge,
    rle_decode,
    rle_from_string,
    rle_to_string,
)
from .tracker import Detection, Tracklet

RESULT_HEADER = "# frame track_id class_id img_h img_w rle"
# feature maps from the upstream detector default to this channel count
DEFAULT_FEATURE_CHANNELS = 1024


@dataclass(frozen=True)
class SequenceMeta:
    name: str
    fps: float
    img_h: int
    img_w: int
    camera_mode: str

    def __post_init__(self):
        if self.fps <= 0:
            raise ParseError(f"sequence fps must be positive, got {self.fps}")
        if self.img_h <= 0 or self.img_w <= 0:
            raise ParseError(f"bad image dims {self.img_h}x{self.img_w}")
        if self.camera_mode not in ("static", "moving"):
            raise ParseError(f"camera_mode must be static or moving, got {self.camera_mode!r}")


@dataclass(frozen=True)
class ResultRecord:
    frame: int
    track_id: int
    class_id: int
    img_h: int
    img_w: int
    rle: str

    def mask(self) -> BinaryMask:
        return rle_from_string(self.rle, self.img_h, self.img_w)

    def to_line(self) -> str:
        return (
            f"{self.frame} {self.track_id} {self.class_id} "
            f"{self.img_h} {self.img_w} {self.rle}"
        )


# ---------------------------------------------------------------------------
# detections
# ---------------------------------------------------------------------------

def load_detections(path: str) -> tuple[SequenceMeta, dict[int, list[Detection]]]:
    """Read a detection file; returns the sequence meta and per-frame lists.

    Frames come out sorted ascending. Raises ParseError (with the offending
    line number), MaskDimMismatch, or MissingFeatures.
    """
    meta: SequenceMeta | None = None
    by_frame: dict[int, list[Detection]] = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            if meta is None:
                meta = _parse_meta(obj, path, lineno)
                continue
            det = _parse_detection(obj, meta, path, lineno)
            by_frame.setdefault(det.frame, []).append(det)
    if meta is None:
        raise ParseError(f"{path}: missing header line")
    return meta, {f: by_frame[f] for f in sorted(by_frame)}


def _parse_meta(obj, path, lineno) -> SequenceMeta:
    try:
        return SequenceMeta(
            name=str(obj["name"]),
            fps=float(obj["fps"]),
            img_h=int(obj["img_h"]),
            img_w=int(obj["img_w"]),
            camera_mode=str(obj["camera_mode"]),
        )
    except KeyError as exc:
        raise ParseError(f"{path}:{lineno}: header missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}:{lineno}: bad header ({exc})") from None


def _parse_detection(obj, meta: SequenceMeta, path, lineno) -> Detection:
    where = f"{path}:{lineno}"
    try:
        frame = int(obj["frame"])
        class_id = int(obj["class_id"])
        score = float(obj["score"])
        bx, by, bw, bh = (float(v) for v in obj["bbox"])
        mask_obj = obj["mask"]
        mh, mw = int(mask_obj["h"]), int(mask_obj["w"])
        token = str(mask_obj["counts"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: bad detection record ({exc})") from None
    if not (0.0 <= score <= 1.0):
        raise ParseError(f"{where}: score {score} outside [0, 1]")
    if (mh, mw) != (meta.img_h, meta.img_w):
        raise MaskDimMismatch(
            f"{where}: mask dims {mh}x{mw} != sequence {meta.img_h}x{meta.img_w}"
        )
    try:
        mask = rle_from_string(token, mh, mw)
    except MalformedToken as exc:
        raise ParseError(f"{where}: {exc}") from None
    except CountsSumMismatch as exc:
        raise MaskDimMismatch(f"{where}: {exc}") from None

    embedding = None
    feature_map = None
    if "embedding" in obj and obj["embedding"] is not None:
        embedding = np.asarray(obj["embedding"], dtype=float)
        if embedding.ndim != 1 or embedding.size == 0:
            raise ParseError(f"{where}: embedding must be a flat list of numbers")
    elif "feature_map" in obj and obj["feature_map"] is not None:
        fm = obj["feature_map"]
        try:
            gh, gw = int(fm["gh"]), int(fm["gw"])
            ch = int(fm.get("c", DEFAULT_FEATURE_CHANNELS))
            values = np.asarray(fm["values"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{where}: bad feature_map ({exc})") from None
        if values.size != gh * gw * ch:
            raise ParseError(
                f"{where}: feature_map has {values.size} values, expected {gh * gw * ch}"
            )
        feature_map = values.reshape(gh, gw, ch)
    else:
        raise MissingFeatures(f"{where}: record needs an embedding or a feature_map")
    try:
        box = BBox(bx, by, bw, bh)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None
    return Detection(frame, class_id, score, box, mask, embedding, feature_map)


def write_detections(
    meta: SequenceMeta, by_frame: dict[int, list[Detection]], path: str
):
    """Write a detection file readable by :func:`load_detections`."""
    with open(path, "w", encoding="ascii") as fh:
        header = {
            "name": meta.name,
            "fps": meta.fps,
            "img_h": meta.img_h,
            "img_w": meta.img_w,
            "camera_mode": meta.camera_mode,
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for frame in sorted(by_frame):
            for det in by_frame[frame]:
                rec = {
                    "frame": det.frame,
                    "class_id": det.class_id,
                    "score": det.score,
                    "bbox": [det.box.x, det.box.y, det.box.w, det.box.h],
                    "mask": {
                        "h": det.mask.height,
                        "w": det.mask.width,
                        "counts": rle_to_string(det.mask),
                    },
                }
                if det.embedding is not None:
                    rec["embedding"] = [float(v) for v in det.embedding]
                elif det.feature_map is not None:
                    gh, gw, ch = det.feature_map.shape
                    rec["feature_map"] = {
                        "gh": gh,
                        "gw": gw,
                        "c": ch,
                        "values": [float(v) for v in det.feature_map.ravel()],
                    }
                fh.write(json.dumps(rec, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

def resolve_records(
    per_frame: dict[int, list[tuple[int, int, BinaryMask]]], meta: SequenceMeta
) -> list[ResultRecord]:
    """Turn per-frame (track_id, class_id, mask) entries into disjoint records.

    Where masks overlap, pixels stay with the lower track id; masks emptied
    by the resolution are dropped. Output is sorted by (frame, track_id).
    """
    records: list[ResultRecord] = []
    for frame in sorted(per_frame):
        entries = sorted(per_frame[frame], key=lambda e: e[0])
        union: BinaryMask | None = None
        area_sum = 0
        for track_id, class_id, mask in entries:
            resolved = mask if union is None else mask_merge(mask, union, "subtract")
            if resolved.area == 0:
                continue
            union = resolved if union is None else mask_merge(union, resolved, "union")
            area_sum += resolved.area
            if union.area != area_sum:
                raise OverlapAfterResolution(
                    f"frame {frame}: masks overlap after resolution"
                )
            records.append(
                ResultRecord(
                    frame,
                    track_id,
                    class_id,
                    meta.img_h,
                    meta.img_w,
                    rle_to_string(resolved),
                )
            )
    return records


def records_from_tracks(tracks: list[Tracklet], meta: SequenceMeta) -> list[ResultRecord]:
    per_frame: dict[int, list[tuple[int, int, BinaryMask]]] = {}
    for t in tracks:
        for o in t.observations:
            per_frame.setdefault(o.frame, []).append((t.id, t.class_id, o.mask))
    return resolve_records(per_frame, meta)


def write_records(records: list[ResultRecord], path: str):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(RESULT_HEADER + "\n")
        for rec in records:
            fh.write(rec.to_line() + "\n")


def write_results(
    tracks: list[Tracklet], meta: SequenceMeta, path: str
) -> list[ResultRecord]:
    """Write finished tracks as a result file; returns the records written."""
    records = records_from_tracks(tracks, meta)
    write_records(records, path)
    return records


def read_results(path: str) -> list[ResultRecord]:
    """Parse a result file; validates decodability and (frame, id) uniqueness."""
    records: list[ResultRecord] = []
    seen: set[tuple[int, int]] = set()
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(" ")
            if len(parts) != 6:
                raise ParseError(f"{path}:{lineno}: expected 6 fields, got {len(parts)}")
            try:
                frame, track_id, class_id, img_h, img_w = (int(p) for p in parts[:5])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer field") from None
            key = (frame, track_id)
            if key in seen:
                raise ParseError(f"{path}:{lineno}: duplicate (frame, track_id) {key}")
            seen.add(key)
            rec = ResultRecord(frame, track_id, class_id, img_h, img_w, parts[5])
            try:
                rec.mask()
            except (MalformedToken, CountsSumMismatch) as exc:
                raise MaskDimMismatch(f"{path}:{lineno}: {exc}") from None
            records.append(rec)
    return records


# ---------------------------------------------------------------------------
# overlays
# ---------------------------------------------------------------------------

def _id_color(track_id: int) -> tuple[int, int, int]:
    hue = (track_id * 0.6180339887498949) % 1.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.65, 1.0)
    return int(r * 255), int(g * 255), int(b * 255)


def render_overlays(records: list[ResultRecord], out_dir: str) -> list[str]:
    """Paint each frame's masks in flat per-id colors into binary PPM files."""
    os.makedirs(out_dir, exist_ok=True)
    by_frame: dict[int, list[ResultRecord]] = {}
    for rec in records:
        by_frame.setdefault(rec.frame, []).append(rec)
    written = []
    for frame in sorted(by_frame):
        recs = by_frame[frame]
        h, w = recs[0].img_h, recs[0].img_w
        for rec in recs:
            if (rec.img_h, rec.img_w) != (h, w):
                raise DimMismatch(
                    f"frame {frame}: mixed image dims {rec.img_h}x{rec.img_w} vs {h}x{w}"
                )
        canvas = np.zeros((h, w, 3), dtype=np.uint8)
        for rec in sorted(recs, key=lambda r: r.track_id):
            grid = rle_decode(rec.mask()).astype(bool)
            canvas[grid] = _id_color(rec.track_id)
        name = os.path.join(out_dir, f"frame_{frame:06d}.ppm")
        with open(name, "wb") as fh:
            fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
            fh.write(canvas.tobytes())
        written.append(name)
    return written
