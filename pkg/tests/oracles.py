"""Independent brute-force reference implementations used by the tests.

Everything here is written directly from the operation definitions with
plain loops, deliberately ignoring how the package implements the same
thing, so a shared bug would have to be coincidental.
"""
from __future__ import annotations

from collections import deque

import numpy as np

SOBEL_X = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]
SOBEL_Y = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]]


def gray_oracle(rgb: np.ndarray) -> np.ndarray:
    h, w, _ = rgb.shape
    out = np.zeros((h, w), dtype=np.uint8)
    for y in range(h):
        for x in range(w):
            r, g, b = (float(v) for v in rgb[y, x])
            v = 0.299 * r + 0.587 * g + 0.114 * b
            out[y, x] = min(255, int(np.floor(v + 0.5)))
    return out


def _clamped(img: np.ndarray, y: int, x: int) -> float:
    h, w = img.shape
    return float(img[min(max(y, 0), h - 1), min(max(x, 0), w - 1)])


def sobel_oracle(img: np.ndarray) -> np.ndarray:
    h, w = img.shape
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            gx = 0.0
            gy = 0.0
            for dy in range(3):
                for dx in range(3):
                    v = _clamped(img, y + dy - 1, x + dx - 1)
                    gx += SOBEL_X[dy][dx] * v
                    gy += SOBEL_Y[dy][dx] * v
            out[y, x] = np.sqrt(gx * gx + gy * gy)
    return out


def median_oracle(img: np.ndarray, window: int) -> np.ndarray:
    h, w = img.shape
    k = window // 2
    out = np.zeros_like(img)
    for y in range(h):
        for x in range(w):
            vals = []
            for dy in range(-k, k + 1):
                for dx in range(-k, k + 1):
                    vals.append(_clamped(img, y + dy, x + dx))
            vals.sort()
            out[y, x] = vals[len(vals) // 2]
    return out


def otsu_scan_oracle(hist) -> int | None:
    """Exhaustive 256-threshold scan maximizing between-class variance."""
    total = float(sum(hist))
    best_t, best_v = None, -1.0
    for t in range(256):
        n0 = sum(hist[: t + 1])
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        mu0 = sum(i * hist[i] for i in range(t + 1)) / n0
        mu1 = sum(i * hist[i] for i in range(t + 1, 256)) / n1
        v = n0 * n1 * (mu0 - mu1) ** 2
        if v > best_v + 1e-9:
            best_v, best_t = v, t
    return best_t


def dilate_oracle(img: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Set-union definition: stamp the element onto every foreground pixel."""
    h, w = img.shape
    sh, sw = mask.shape
    ry, rx = sh // 2, sw // 2
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            if not img[y, x]:
                continue
            for sy in range(sh):
                for sx in range(sw):
                    if not mask[sy, sx]:
                        continue
                    yy, xx = y + sy - ry, x + sx - rx
                    if 0 <= yy < h and 0 <= xx < w:
                        out[yy, xx] = True
    return out


def erode_oracle(img: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Per-pixel definition: true iff the element placed there fits in foreground."""
    h, w = img.shape
    sh, sw = mask.shape
    ry, rx = sh // 2, sw // 2
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            ok = True
            for sy in range(sh):
                for sx in range(sw):
                    if not mask[sy, sx]:
                        continue
                    yy, xx = y + sy - ry, x + sx - rx
                    if not (0 <= yy < h and 0 <= xx < w and img[yy, xx]):
                        ok = False
            out[y, x] = ok
    return out


def fill_holes_oracle(img: np.ndarray) -> np.ndarray:
    """Flood the background from the border (4-connected); the rest is hole."""
    h, w = img.shape
    reached = np.zeros((h, w), dtype=bool)
    queue = deque()
    for x in range(w):
        for y in (0, h - 1):
            if not img[y, x] and not reached[y, x]:
                reached[y, x] = True
                queue.append((y, x))
    for y in range(h):
        for x in (0, w - 1):
            if not img[y, x] and not reached[y, x]:
                reached[y, x] = True
                queue.append((y, x))
    while queue:
        y, x = queue.popleft()
        for dy, dx in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            yy, xx = y + dy, x + dx
            if 0 <= yy < h and 0 <= xx < w and not img[yy, xx] and not reached[yy, xx]:
                reached[yy, xx] = True
                queue.append((yy, xx))
    return img | ~reached


def flood_label_oracle(img: np.ndarray, connectivity: int) -> np.ndarray:
    """BFS flood-fill labeling, components numbered by first-pixel raster order."""
    h, w = img.shape
    if connectivity == 4:
        steps = ((1, 0), (-1, 0), (0, 1), (0, -1))
    else:
        steps = tuple((dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if dy or dx)
    labels = np.zeros((h, w), dtype=np.int32)
    nxt = 0
    for y in range(h):
        for x in range(w):
            if img[y, x] and labels[y, x] == 0:
                nxt += 1
                labels[y, x] = nxt
                queue = deque([(y, x)])
                while queue:
                    cy, cx = queue.popleft()
                    for dy, dx in steps:
                        yy, xx = cy + dy, cx + dx
                        if 0 <= yy < h and 0 <= xx < w and img[yy, xx] and labels[yy, xx] == 0:
                            labels[yy, xx] = nxt
                            queue.append((yy, xx))
    return labels


def conv2d_oracle(x: np.ndarray, kernels: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Six-loop same-padded stride-1 cross-correlation, (H, W, Cin) -> (H, W, Cout)."""
    hh, ww, cin = x.shape
    kh, kw, _, cout = kernels.shape
    py, px = kh // 2, kw // 2
    out = np.zeros((hh, ww, cout))
    for y in range(hh):
        for x_ in range(ww):
            for co in range(cout):
                acc = float(bias[co])
                for dy in range(kh):
                    for dx in range(kw):
                        yy, xx = y + dy - py, x_ + dx - px
                        if 0 <= yy < hh and 0 <= xx < ww:
                            for ci in range(cin):
                                acc += x[yy, xx, ci] * kernels[dy, dx, ci, co]
                out[y, x_, co] = acc
    return out


def maxpool_oracle(x: np.ndarray, window: int, stride: int) -> np.ndarray:
    hh, ww, c = x.shape
    oh = (hh - window) // stride + 1
    ow = (ww - window) // stride + 1
    out = np.zeros((oh, ow, c))
    for y in range(oh):
        for x_ in range(ow):
            for ch in range(c):
                block = x[y * stride:y * stride + window, x_ * stride:x_ * stride + window, ch]
                out[y, x_, ch] = block.max()
    return out


def iou_oracle(a, b) -> float:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    ix = max(0, min(ax + aw, bx + bw) - max(ax, bx))
    iy = max(0, min(ay + ah, by + bh) - max(ay, by))
    inter = ix * iy
    union = aw * ah + bw * bh - inter
    return inter / union if union else 0.0
