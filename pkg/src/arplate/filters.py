"""Sobel edge detection, median filtering and Otsu binarization.

These are the front half of the localization chain: gradients are kept
as unclamped floats so the threshold sees the full dynamic range, and
every windowed operation replicates edge pixels rather than padding
with zeros (zero padding would fabricate strong edges along the image
border and pollute the plate candidates).
"""
from __future__ import annotations

import numpy as np

from .validation import check_binary_image, check_gradient_map, check_gray_image

SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = SOBEL_X.T


def sobel(img: np.ndarray) -> np.ndarray:
    """Gradient magnitude sqrt(Gx^2 + Gy^2) with 3x3 Sobel kernels.

    Kernels are applied as cross-correlation; borders are handled by
    edge replication.  Requires at least a 3x3 image.
    """
    img = check_gray_image(img)
    h, w = img.shape
    if h < 3 or w < 3:
        raise ValueError(f"sobel needs an image of at least 3x3, got {h}x{w}")
    p = np.pad(img.astype(np.float64), 1, mode="edge")
    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    for dy in range(3):
        for dx in range(3):
            win = p[dy:dy + h, dx:dx + w]
            gx += SOBEL_X[dy, dx] * win
            gy += SOBEL_Y[dy, dx] * win
    return np.sqrt(gx * gx + gy * gy)


def median_filter(img: np.ndarray, window: int = 5) -> np.ndarray:
    """Replace each pixel by the median of its window x window neighborhood.

    The window must be odd so the median is always a sample value; edges
    are replicated.  Output dtype matches the input.
    """
    img = check_gray_image(img)
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 3, got {window}")
    h, w = img.shape
    k = window // 2
    p = np.pad(img, k, mode="edge")
    stack = np.empty((window * window, h, w), dtype=img.dtype)
    i = 0
    for dy in range(window):
        for dx in range(window):
            stack[i] = p[dy:dy + h, dx:dx + w]
            i += 1
    # odd sample count, so the median is an exact element of the window
    return np.median(stack, axis=0).astype(img.dtype)


def _otsu_level(hist: np.ndarray) -> int | None:
    """Threshold level in [0, 255] maximizing between-class variance.

    Classes are {bin <= t} vs {bin > t}.  Returns the lowest maximizing
    level, or None when the histogram is degenerate (single occupied
    bin, so every split has zero between-class variance).
    """
    hist = hist.astype(np.float64)
    total = hist.sum()
    if total == 0 or np.count_nonzero(hist) < 2:
        return None
    levels = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(hist)
    w1 = total - w0
    mass0 = np.cumsum(hist * levels)
    mu_total = mass0[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = mass0 / w0
        mu1 = (mu_total - mass0) / w1
        var_between = w0 * w1 * (mu0 - mu1) ** 2
    var_between[~np.isfinite(var_between)] = 0.0
    return int(np.argmax(var_between))


def quantize_magnitudes(g: np.ndarray) -> np.ndarray:
    """Map non-negative magnitudes onto 256 integer levels (0..255)."""
    g = check_gradient_map(g)
    top = g.max()
    if top == 0:
        return np.zeros(g.shape, dtype=np.int64)
    return np.floor(g / top * 255.0 + 0.5).astype(np.int64)


def otsu_threshold(g: np.ndarray) -> np.ndarray:
    """Binarize a gradient map at the Otsu-optimal level.

    Magnitudes are quantized to 256 bins; foreground is everything
    strictly above the chosen level.  A constant map has no usable
    split and yields an all-background image.
    """
    q = quantize_magnitudes(g)
    hist = np.bincount(q.ravel(), minlength=256)
    level = _otsu_level(hist)
    if level is None:
        return np.zeros(q.shape, dtype=bool)
    return q > level


def otsu_ink(img: np.ndarray) -> np.ndarray:
    """Binarize a gray image with dark pixels as foreground (ink).

    Used on plate crops where glyphs are dark on a light background.
    A constant image yields all background.
    """
    img = check_gray_image(img)
    hist = np.bincount(img.ravel(), minlength=256)
    level = _otsu_level(hist)
    if level is None:
        return np.zeros(img.shape, dtype=bool)
    return img <= level


def rescale_to_gray(g: np.ndarray) -> np.ndarray:
    """Rescale a gradient map to uint8 for stage dumps."""
    g = check_gradient_map(g)
    top = g.max()
    if top == 0:
        return np.zeros(g.shape, dtype=np.uint8)
    return np.floor(g / top * 255.0 + 0.5).astype(np.uint8)


def mask_median_smooth(mask: np.ndarray, window: int = 5) -> np.ndarray:
    """Median-filter a binary mask by mapping it through {0, 255}.

    The mask is rendered to 8-bit, filtered, and re-thresholded at 128,
    which for an odd window equals majority voting inside the window.
    """
    mask = check_binary_image(mask)
    as_gray = np.where(mask, 255, 0).astype(np.uint8)
    return median_filter(as_gray, window) >= 128
