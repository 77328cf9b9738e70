"""Input validation helpers for the image and tensor currencies.

All pipeline code goes through these checkers so shape/dtype errors
surface at the boundary with a readable message instead of deep inside
numpy broadcasting.
"""
from __future__ import annotations

import numpy as np


def check_rgb_image(img) -> np.ndarray:
    """Validate an (H, W, 3) uint8 color image and return it as such."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected RGB image of shape (H, W, 3), got {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image dimensions must be >= 1")
    if arr.dtype != np.uint8:
        if np.issubdtype(arr.dtype, np.integer) and arr.min() >= 0 and arr.max() <= 255:
            arr = arr.astype(np.uint8)
        else:
            raise ValueError(f"RGB image must be uint8 in [0, 255], got dtype {arr.dtype}")
    return arr


def check_gray_image(img) -> np.ndarray:
    """Validate an (H, W) uint8 grayscale image and return it as such."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"expected grayscale image of shape (H, W), got {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image dimensions must be >= 1")
    if arr.dtype != np.uint8:
        if np.issubdtype(arr.dtype, np.integer) and arr.min() >= 0 and arr.max() <= 255:
            arr = arr.astype(np.uint8)
        else:
            raise ValueError(f"gray image must be uint8 in [0, 255], got dtype {arr.dtype}")
    return arr


def check_binary_image(img) -> np.ndarray:
    """Validate an (H, W) boolean mask (foreground = True)."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"expected binary image of shape (H, W), got {arr.shape}")
    if arr.dtype != bool:
        if np.issubdtype(arr.dtype, np.integer) and set(np.unique(arr)) <= {0, 1}:
            arr = arr.astype(bool)
        else:
            raise ValueError(f"binary image must be bool, got dtype {arr.dtype}")
    return arr


def check_gradient_map(g) -> np.ndarray:
    """Validate an (H, W) map of non-negative float magnitudes."""
    arr = np.asarray(g, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected non-empty gradient map of shape (H, W), got {arr.shape}")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("gradient magnitudes must be finite and >= 0")
    return arr


def check_bbox(bbox, width: int, height: int) -> tuple[int, int, int, int]:
    """Validate an (x, y, w, h) box against image bounds."""
    x, y, w, h = (int(v) for v in bbox)
    if w < 1 or h < 1:
        raise ValueError(f"box must have positive size, got {(x, y, w, h)}")
    if x < 0 or y < 0 or x + w > width or y + h > height:
        raise ValueError(f"box {(x, y, w, h)} out of bounds for {width}x{height} image")
    return x, y, w, h


def check_glyph_batch(X) -> np.ndarray:
    """Validate a batch of normalized glyphs, shape (n, 32, 32), values in [0, 1]."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 2 and arr.shape == (32, 32):
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1:] != (32, 32):
        raise ValueError(f"expected glyphs of shape (n, 32, 32), got {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("glyph values must lie in [0, 1]")
    return arr
