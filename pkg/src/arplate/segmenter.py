"""Plate segmentation: header/body split, character boxes, glyph crops.

An Egyptian plate has a country strip on top and the registration
characters below, digits in the left zone and letters in the right,
separated by a wide physical gap.  Letters read right to left, so the
first letter of a reading is the rightmost box; digits serialize most
significant first (left to right).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .filters import otsu_ink
from .morphology import connected_components
from .validation import check_bbox, check_gray_image

GLYPH_SIZE = 32
MIN_AREA_FRAC = 0.005
MAX_AREA_FRAC = 0.40
SPLIT_LO = 0.2
SPLIT_HI = 0.45


@dataclass
class CharBox:
    bbox: tuple[int, int, int, int]  # within the plate/body crop
    band: str                        # "digit" or "letter"
    order_index: int


def split_bands(plate: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cut the plate into (header, body) at the emptiest row.

    The cut row minimizes the binarized ink count over rows in
    [0.2 H, 0.45 H]; ties go to the topmost row.
    """
    plate = check_gray_image(plate)
    h = plate.shape[0]
    if h < 20:
        raise ValueError(f"plate of height {h} is too small to split")
    ink = otsu_ink(plate)
    counts = ink.sum(axis=1)
    lo = math.ceil(SPLIT_LO * h)
    hi = math.floor(SPLIT_HI * h)
    window = counts[lo:hi + 1]
    cut = lo + int(np.argmin(window))
    return plate[:cut], plate[cut:]


def _column_gaps(boxes, width: int):
    """Maximal unoccupied column runs strictly between occupied columns."""
    occupied = np.zeros(width, dtype=bool)
    for x, _, w, _ in boxes:
        occupied[x:x + w] = True
    cols = np.flatnonzero(occupied)
    if cols.size == 0:
        return []
    first, last = cols[0], cols[-1]
    gaps = []
    run_start = None
    for c in range(first, last + 1):
        if not occupied[c]:
            if run_start is None:
                run_start = c
        elif run_start is not None:
            gaps.append((run_start, c - run_start))
            run_start = None
    return gaps


def _merge_x_overlapping(items):
    """Union components whose x-ranges overlap by more than half of the
    narrower one: detached dots above or below a glyph belong to it.
    Items are ((x, y, w, h), area) pairs; merged groups get the union
    box and the summed area.
    """
    items = list(items)
    merged = True
    while merged:
        merged = False
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                (xi, yi, wi, hi), ai = items[i]
                (xj, yj, wj, hj), aj = items[j]
                overlap = min(xi + wi, xj + wj) - max(xi, xj)
                if overlap > 0.5 * min(wi, wj):
                    x = min(xi, xj)
                    y = min(yi, yj)
                    x2 = max(xi + wi, xj + wj)
                    y2 = max(yi + hi, yj + hj)
                    items[i] = ((x, y, x2 - x, y2 - y), ai + aj)
                    del items[j]
                    merged = True
                    break
            if merged:
                break
    return items


def segment_chars(body: np.ndarray) -> list[CharBox]:
    """Character boxes in the body band, ordered for reading.

    Oversized components (over 40% of the body) and components touching
    two or more body borders are dropped, x-overlapping components are
    merged so detached dots rejoin their glyph, then groups under 0.5%
    of the body area are discarded as speckle.  The digit/letter
    divider is the widest whitespace gap in the column occupancy.
    """
    body = check_gray_image(body)
    h, w = body.shape
    ink = otsu_ink(body)
    body_area = h * w
    pieces = []
    for region in connected_components(ink, connectivity=8):
        x, y, bw, bh = region.bbox
        if region.area > MAX_AREA_FRAC * body_area:
            continue
        touched = (x == 0) + (y == 0) + (x + bw == w) + (y + bh == h)
        if touched >= 2:
            continue
        pieces.append((region.bbox, region.area))
    kept = [bbox for bbox, area in _merge_x_overlapping(pieces)
            if area >= MIN_AREA_FRAC * body_area]
    if not kept:
        return []
    gaps = _column_gaps(kept, w)
    if gaps:
        best = max(gaps, key=lambda g: (g[1], -g[0]))
        divider = best[0] + best[1] / 2.0
    else:
        divider = float(w + 1)  # no interior gap: everything lands in the digit zone
    digit_boxes = sorted((b for b in kept if b[0] + b[2] / 2.0 < divider),
                         key=lambda b: b[0])
    letter_boxes = sorted((b for b in kept if b[0] + b[2] / 2.0 >= divider),
                          key=lambda b: -b[0])
    out = []
    for bbox in digit_boxes:
        out.append(CharBox(bbox=bbox, band="digit", order_index=len(out)))
    for bbox in letter_boxes:
        out.append(CharBox(bbox=bbox, band="letter", order_index=len(out)))
    return out


def resize_bilinear(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resample with corners mapped to corners."""
    src = np.asarray(img, dtype=np.float64)
    h, w = src.shape
    ys = np.linspace(0, h - 1, out_h) if out_h > 1 else np.zeros(1)
    xs = np.linspace(0, w - 1, out_w) if out_w > 1 else np.zeros(1)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    tl = src[np.ix_(y0, x0)]
    tr = src[np.ix_(y0, x1)]
    bl = src[np.ix_(y1, x0)]
    br = src[np.ix_(y1, x1)]
    top = tl + (tr - tl) * fx
    bot = bl + (br - bl) * fx
    return top + (bot - top) * fy


def normalize_gray_values(glyph: np.ndarray) -> np.ndarray:
    """Min-max scale to [0, 1] with ink high: a dark-on-light crop is
    inverted so ink is near 1 and background near 0; a constant crop
    becomes all zero.
    """
    g = np.asarray(glyph, dtype=np.float64)
    lo, hi = g.min(), g.max()
    if hi == lo:
        return np.zeros_like(g)
    g = (g - lo) / (hi - lo)
    if g.mean() > 0.5:  # light background dominates: flip polarity
        g = 1.0 - g
    return g


def normalize_glyph(body: np.ndarray, box: CharBox | tuple) -> np.ndarray:
    """Crop a character box and normalize it to a 32x32 glyph in [0, 1]."""
    body = check_gray_image(body)
    bbox = box.bbox if isinstance(box, CharBox) else box
    x, y, w, h = check_bbox(bbox, body.shape[1], body.shape[0])
    crop = body[y:y + h, x:x + w].astype(np.float64)
    side = max(w, h)
    if side > min(w, h):
        ring = np.concatenate([crop[0], crop[-1], crop[:, 0], crop[:, -1]])
        bg = float(np.median(ring))
        padded = np.full((side, side), bg)
        oy = (side - h) // 2
        ox = (side - w) // 2
        padded[oy:oy + h, ox:ox + w] = crop
        crop = padded
    resized = resize_bilinear(crop, GLYPH_SIZE, GLYPH_SIZE)
    return normalize_gray_values(resized)


def normalize_autocrop(img: np.ndarray) -> np.ndarray:
    """Normalize a full glyph image around its own ink bounding box.

    This is the training-side twin of normalize_glyph: the ink box is
    found the way the segmenter finds it at read time (components with
    speckle smaller than 0.5% of the image dropped, x-overlapping parts
    merged, largest group wins), so training and inference glyphs
    agree.  An image with no usable ink becomes all zero.
    """
    img = check_gray_image(img)
    ink = otsu_ink(img)
    area = img.shape[0] * img.shape[1]
    pieces = [(r.bbox, r.area) for r in connected_components(ink, connectivity=8)
              if r.area >= MIN_AREA_FRAC * area]
    if not pieces:
        return np.zeros((GLYPH_SIZE, GLYPH_SIZE))
    groups = _merge_x_overlapping(pieces)
    bbox = max(groups, key=lambda g: g[1])[0]
    return normalize_glyph(img, bbox)


def segment_plate(plate: np.ndarray):
    """Full plate to (boxes, glyph batch): split, segment, normalize."""
    _, body = split_bands(plate)
    boxes = segment_chars(body)
    glyphs = np.stack([normalize_glyph(body, b) for b in boxes]) if boxes else (
        np.zeros((0, GLYPH_SIZE, GLYPH_SIZE)))
    return boxes, glyphs
