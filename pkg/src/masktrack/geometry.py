"""Binary instance masks stored as column-major run-length encodings.

Masks are immutable. The run list always starts with a background run
(possibly of length zero), alternates background/foreground, and sums to
``height * width``. Set operations and IOU work directly on the runs, so
their cost scales with the number of runs rather than the number of pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CountsSumMismatch, MalformedToken, ShapeMismatch


@dataclass(frozen=True)
class BinaryMask:
    """Run-length encoded binary mask.

    Attributes:
        height: Image height in pixels.
        width: Image width in pixels.
        counts: Run lengths in column-major pixel order, background first.
    """

    height: int
    width: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.height <= 0 or self.width <= 0:
            raise ShapeMismatch(f"mask dims must be positive, got {self.height}x{self.width}")
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        for i, c in enumerate(counts):
            if c < 0:
                raise CountsSumMismatch(f"negative run length {c} at index {i}")
            if c == 0 and i > 0:
                raise CountsSumMismatch(f"zero-length run at index {i} (non-canonical)")
        total = sum(counts)
        if total != self.height * self.width:
            raise CountsSumMismatch(
                f"counts sum {total} != {self.height}*{self.width}"
            )

    @property
    def area(self) -> int:
        """Number of foreground pixels."""
        return sum(self.counts[1::2])

    def __bool__(self) -> bool:
        return self.area > 0


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box: top-left corner (x, y), width w, height h."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite bbox field {name}")
        if self.w < 0 or self.h < 0:
            raise ValueError(f"negative bbox size {self.w}x{self.h}")

    @property
    def empty(self) -> bool:
        return self.w <= 0 or self.h <= 0

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def top_left(self) -> tuple[float, float]:
        return (self.x, self.y)


# ---------------------------------------------------------------------------
# pixel-grid codec
# ---------------------------------------------------------------------------

def rle_decode(mask: BinaryMask) -> np.ndarray:
    """Expand a mask to a dense height x width uint8 grid."""
    values = np.arange(len(mask.counts), dtype=np.uint8) & 1
    flat = np.repeat(values, mask.counts)
    return flat.reshape((mask.height, mask.width), order="F")


def rle_encode(grid: np.ndarray) -> BinaryMask:
    """Encode a dense 2-D {0,1} grid into canonical run lengths.

    Inverse of :func:`rle_decode`: ``rle_decode(rle_encode(g))`` equals ``g``.
    """
    grid = np.asarray(grid)
    if grid.ndim != 2:
        raise ShapeMismatch(f"grid must be 2-D, got shape {grid.shape}")
    h, w = grid.shape
    flat = (grid != 0).astype(np.int8).ravel(order="F")
    fenced = np.concatenate(([-1], flat, [-1]))
    borders = np.nonzero(np.diff(fenced))[0]
    runs = np.diff(borders)
    counts = runs.tolist()
    if flat.size and flat[0] == 1:
        counts = [0] + counts
    return BinaryMask(h, w, tuple(counts))


# ---------------------------------------------------------------------------
# compressed string codec
# ---------------------------------------------------------------------------
# Counts are delta-coded (each count from the fourth onward is stored relative
# to the count two positions back) and written LEB128-style: 5 value bits per
# character, low bits first, bit 6 as the continuation flag, all offset by 48
# so tokens stay printable ASCII. Negative deltas rely on sign extension.

def rle_to_string(mask: BinaryMask) -> str:
    """Serialize run lengths to the compact printable token."""
    counts = mask.counts
    out = []
    for i, c in enumerate(counts):
        x = c - counts[i - 2] if i > 2 else c
        more = True
        while more:
            chunk = x & 0x1F
            x >>= 5
            more = (x != -1) if (chunk & 0x10) else (x != 0)
            if more:
                chunk |= 0x20
            out.append(chr(chunk + 48))
    return "".join(out)


def rle_from_string(token: str, height: int, width: int) -> BinaryMask:
    """Parse a compact token back into a mask of the given dimensions."""
    counts: list[int] = []
    pos = 0
    n = len(token)
    while pos < n:
        x = 0
        shift = 0
        more = True
        while more:
            if pos >= n:
                raise MalformedToken(f"token truncated at character {pos}")
            chunk = ord(token[pos]) - 48
            if chunk < 0 or chunk > 63:
                raise MalformedToken(f"invalid character {token[pos]!r} at {pos}")
            x |= (chunk & 0x1F) << shift
            more = bool(chunk & 0x20)
            pos += 1
            shift += 5
            if not more and (chunk & 0x10):
                x |= -1 << shift
        if len(counts) > 2:
            x += counts[-2]
        counts.append(x)
    return BinaryMask(height, width, tuple(counts))


# ---------------------------------------------------------------------------
# run-level set operations
# ---------------------------------------------------------------------------

def _chunk_walk(a_counts, b_counts):
    """Step both run lists in lock-step, yielding (length, value_a, value_b)."""
    ia = ib = 0
    ra = rb = 0
    na, nb = len(a_counts), len(b_counts)
    while True:
        while ra == 0 and ia < na:
            ra = a_counts[ia]
            ia += 1
        while rb == 0 and ib < nb:
            rb = b_counts[ib]
            ib += 1
        if ra == 0 and rb == 0:
            return
        step = min(ra, rb)
        yield step, (ia - 1) & 1, (ib - 1) & 1
        ra -= step
        rb -= step


def _require_same_shape(a: BinaryMask, b: BinaryMask):
    if a.height != b.height or a.width != b.width:
        raise ShapeMismatch(
            f"mask dims differ: {a.height}x{a.width} vs {b.height}x{b.width}"
        )


def mask_iou(a: BinaryMask, b: BinaryMask) -> float:
    """Intersection over union of two masks, computed on the runs.

    The run lists are cut at each other's boundaries; every resulting
    segment has one value per mask, so intersection and union reduce to
    integer sums over segments. Returns 0.0 when the union is empty.
    """
    _require_same_shape(a, b)
    ca = np.cumsum(a.counts)
    cb = np.cumsum(b.counts)
    ends = np.union1d(ca, cb)
    seg = np.diff(ends, prepend=0)
    # index of the run covering each segment; odd runs are foreground
    va = np.searchsorted(ca, ends, side="left") & 1
    vb = np.searchsorted(cb, ends, side="left") & 1
    inter = int(seg[(va & vb).astype(bool)].sum())
    union = int(seg[(va | vb).astype(bool)].sum())
    if union == 0:
        return 0.0
    return inter / union


def mask_intersection_area(a: BinaryMask, b: BinaryMask) -> int:
    """Number of pixels set in both masks."""
    _require_same_shape(a, b)
    return sum(step for step, va, vb in _chunk_walk(a.counts, b.counts) if va and vb)


def mask_merge(a: BinaryMask, b: BinaryMask, op: str) -> BinaryMask:
    """Combine two masks; ``op`` is one of 'union', 'intersect', 'subtract'."""
    _require_same_shape(a, b)
    if op == "union":
        combine = lambda x, y: x | y
    elif op == "intersect":
        combine = lambda x, y: x & y
    elif op == "subtract":
        combine = lambda x, y: x & (1 - y)
    else:
        raise ValueError(f"unknown op {op!r}")
    counts: list[int] = []
    cur_val = 0
    cur_len = 0
    for step, va, vb in _chunk_walk(a.counts, b.counts):
        v = combine(va, vb)
        if v == cur_val:
            cur_len += step
        else:
            counts.append(cur_len)
            cur_val = v
            cur_len = step
    counts.append(cur_len)
    return BinaryMask(a.height, a.width, tuple(counts))


def mask_to_bbox(mask: BinaryMask) -> BBox:
    """Tight box around the foreground; empty masks give a zero-size box."""
    h = mask.height
    col_min = row_min = None
    col_max = row_max = None
    pos = 0
    for i, run in enumerate(mask.counts):
        if i & 1 and run:
            start, end = pos, pos + run - 1
            c1, r1 = start // h, start % h
            c2, r2 = end // h, end % h
            if c2 > c1:
                lo, hi = 0, h - 1
            else:
                lo, hi = r1, r2
            col_min = c1 if col_min is None else min(col_min, c1)
            col_max = c2 if col_max is None else max(col_max, c2)
            row_min = lo if row_min is None else min(row_min, lo)
            row_max = hi if row_max is None else max(row_max, hi)
        pos += run
    if col_min is None:
        return BBox(0.0, 0.0, 0.0, 0.0)
    return BBox(
        float(col_min),
        float(row_min),
        float(col_max - col_min + 1),
        float(row_max - row_min + 1),
    )


def bbox_iou(a: BBox, b: BBox) -> float:
    """Rectangle IOU; degenerate boxes give 0."""
    if a.empty or b.empty:
        return 0.0
    ix = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    iy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def rect_mask(height: int, width: int, box: BBox) -> BinaryMask:
    """Rasterize an axis-aligned rectangle, clipped to the image."""
    x0 = max(0, int(round(box.x)))
    y0 = max(0, int(round(box.y)))
    x1 = min(width, int(round(box.x + box.w)))
    y1 = min(height, int(round(box.y + box.h)))
    if x1 <= x0 or y1 <= y0:
        return BinaryMask(height, width, (height * width,))
    # raw alternation, zero-length runs allowed, then canonicalize
    run_h = y1 - y0
    raw = [x0 * height + y0]
    for col in range(x0, x1):
        raw.append(run_h)
        if col < x1 - 1:
            raw.append(height - run_h)
        else:
            raw.append((width - 1 - col) * height + (height - y1))
    merged: list[int] = []
    cur_val = 0
    cur_len = 0
    val = 0
    for c in raw:
        if c:
            if val == cur_val:
                cur_len += c
            else:
                merged.append(cur_len)
                cur_val = val
                cur_len = c
        val ^= 1
    merged.append(cur_len)
    return BinaryMask(height, width, tuple(merged))
