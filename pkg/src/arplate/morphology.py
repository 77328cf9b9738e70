"""Binary morphology and connected-component labeling.

Conventions that the rest of the pipeline (and the duality tests)
depend on:

* A structuring element has odd dimensions, its origin at the center,
  and the origin bit set.
* Out-of-bounds pixels count as background for both dilation and
  erosion, so erosion shrinks objects at the image border.  This breaks
  naive dilate/erode duality unless the comparison pads the image first.
* Dilation is the stamp union: the element is stamped onto every
  foreground pixel, so ``dilate(img, se)[p] = OR img[p - o]`` over the
  element offsets ``o``.  Erosion is the fit test: ``erode(img, se)[p]``
  is true iff the element placed at ``p`` lies entirely inside the
  foreground, ``AND img[p + o]``.  The pair is an adjunction, which is
  what makes opening and closing idempotent for any element, and gives
  the textbook duality ``dilate(img, se) = ~erode(~img, reflect(se))``
  away from the border.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_binary_image


@dataclass(frozen=True)
class StructuringElement:
    """Odd-sized boolean neighborhood mask with a centered origin."""

    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 2:
            raise ValueError("structuring element must be 2-D")
        h, w = mask.shape
        if h % 2 == 0 or w % 2 == 0:
            raise ValueError(f"structuring element dims must be odd, got {h}x{w}")
        if not mask.any():
            raise ValueError("structuring element needs at least one true bit")
        if not mask[h // 2, w // 2]:
            raise ValueError("structuring element origin bit must be true")
        object.__setattr__(self, "mask", mask)

    @property
    def shape(self):
        return self.mask.shape

    def offsets(self):
        """(dy, dx) of each true bit relative to the center."""
        h, w = self.mask.shape
        ys, xs = np.nonzero(self.mask)
        return list(zip((ys - h // 2).tolist(), (xs - w // 2).tolist()))

    def reflected(self) -> "StructuringElement":
        return StructuringElement(self.mask[::-1, ::-1])

    @staticmethod
    def rectangle(height: int, width: int) -> "StructuringElement":
        return StructuringElement(np.ones((height, width), dtype=bool))

    @staticmethod
    def square(size: int) -> "StructuringElement":
        return StructuringElement.rectangle(size, size)

    @staticmethod
    def hline(length: int) -> "StructuringElement":
        return StructuringElement.rectangle(1, length)

    @staticmethod
    def vline(length: int) -> "StructuringElement":
        return StructuringElement.rectangle(length, 1)


def _shift(img: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """Content of img sampled at (y + dy, x + dx); out of bounds = False."""
    h, w = img.shape
    out = np.zeros_like(img)
    ys = slice(max(dy, 0), min(h + dy, h))
    xs = slice(max(dx, 0), min(w + dx, w))
    yd = slice(max(-dy, 0), max(-dy, 0) + (ys.stop - ys.start))
    xd = slice(max(-dx, 0), max(-dx, 0) + (xs.stop - xs.start))
    if ys.stop > ys.start and xs.stop > xs.start:
        out[yd, xd] = img[ys, xs]
    return out


def dilate(img: np.ndarray, se: StructuringElement) -> np.ndarray:
    img = check_binary_image(img)
    out = np.zeros_like(img)
    for dy, dx in se.offsets():
        out |= _shift(img, -dy, -dx)
    return out


def erode(img: np.ndarray, se: StructuringElement) -> np.ndarray:
    img = check_binary_image(img)
    out = np.ones_like(img)
    for dy, dx in se.offsets():
        out &= _shift(img, dy, dx)
    return out


def opening(img: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Erode then dilate: removes structures the element cannot cover."""
    return dilate(erode(img, se), se)


def closing(img: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Dilate then erode: bridges gaps the element can span."""
    return erode(dilate(img, se), se)


def fill_holes(img: np.ndarray) -> np.ndarray:
    """Turn enclosed background into foreground.

    Background is tracked 4-connected (the dual of 8-connected
    foreground); any background component that never touches the image
    border is a hole.
    """
    img = check_binary_image(img)
    bg = ~img
    labels, n = label_components(bg, connectivity=4)
    if n == 0:
        return img.copy()
    border = np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])
    border_ids = np.unique(border[border > 0])
    keep_open = np.zeros(n + 1, dtype=bool)
    keep_open[border_ids] = True
    holes = bg & ~keep_open[labels]
    return img | holes


@dataclass
class Region:
    """A labeled connected component with its tight bounding box."""

    label: int
    bbox: tuple[int, int, int, int]  # (x, y, w, h)
    area: int

    @property
    def width(self) -> int:
        return self.bbox[2]

    @property
    def height(self) -> int:
        return self.bbox[3]

    @property
    def fill_ratio(self) -> float:
        x, y, w, h = self.bbox
        return self.area / (w * h)


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self):
        self.parent = []

    def make(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, a: int) -> int:
        parent = self.parent
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _row_runs(row: np.ndarray):
    d = np.diff(np.concatenate(([0], row.astype(np.int8), [0])))
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    return starts.tolist(), ends.tolist()


def label_components(img: np.ndarray, connectivity: int = 8):
    """Label foreground components; returns (labels, count).

    Labels are 1..count in raster order of each component's first pixel;
    0 is background.  Uses run-based two-pass union-find, so rows are
    scanned once and merging cost is proportional to the run count.
    """
    img = check_binary_image(img)
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    h, w = img.shape
    labels = np.zeros((h, w), dtype=np.int32)
    uf = _UnionFind()
    reach = 1 if connectivity == 8 else 0
    runs = []  # (y, start, end, provisional_id)
    prev = []  # runs of the previous row
    for y in range(h):
        starts, ends = _row_runs(img[y])
        cur = []
        for s, e in zip(starts, ends):
            lo, hi = s - reach, e + reach
            rid = -1
            for ps, pe, pid in prev:
                if ps < hi and pe > lo:
                    if rid < 0:
                        rid = pid
                    else:
                        uf.union(rid, pid)
            if rid < 0:
                rid = uf.make()
            cur.append((s, e, rid))
            runs.append((y, s, e, rid))
        prev = cur
    # final ids in raster order of first appearance
    final = {}
    for y, s, e, rid in runs:
        root = uf.find(rid)
        if root not in final:
            final[root] = len(final) + 1
        labels[y, s:e] = final[root]
    return labels, len(final)


def connected_components(img: np.ndarray, connectivity: int = 8) -> list[Region]:
    """Extract components as Region records ordered by first-pixel raster order."""
    labels, n = label_components(img, connectivity)
    if n == 0:
        return []
    ys, xs = np.nonzero(labels)
    ids = labels[ys, xs]
    area = np.bincount(ids, minlength=n + 1)
    min_x = np.full(n + 1, np.iinfo(np.int64).max)
    max_x = np.full(n + 1, -1)
    min_y = np.full(n + 1, np.iinfo(np.int64).max)
    max_y = np.full(n + 1, -1)
    np.minimum.at(min_x, ids, xs)
    np.maximum.at(max_x, ids, xs)
    np.minimum.at(min_y, ids, ys)
    np.maximum.at(max_y, ids, ys)
    regions = []
    for lab in range(1, n + 1):
        bbox = (
            int(min_x[lab]),
            int(min_y[lab]),
            int(max_x[lab] - min_x[lab] + 1),
            int(max_y[lab] - min_y[lab] + 1),
        )
        regions.append(Region(label=lab, bbox=bbox, area=int(area[lab])))
    return regions
