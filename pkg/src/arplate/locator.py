"""Multi-stage plate localization.

The chain: grayscale, Sobel magnitude, Otsu binarization, dilation with
a wide element that fuses character edges into one blob, median
smoothing of the mask, hole filling, erosion, elimination of long thin
lines, then connected components gated by metric size and aspect ratio.

The size gate is parameterized by image resolution in pixels/cm against
the standard 32 x 17 cm plate instead of absolute pixel thresholds, so
the same configuration works at any sensor scale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import ParamsMixin
from .filters import mask_median_smooth, otsu_threshold, rescale_to_gray, sobel
from .morphology import (
    Region,
    StructuringElement,
    connected_components,
    dilate,
    erode,
    fill_holes,
    opening,
)
from .raster import to_gray
from .validation import check_bbox, check_gray_image

PLATE_WIDTH_CM = 32.0
PLATE_HEIGHT_CM = 17.0


@dataclass
class LocatorConfig:
    pixels_per_cm: float = 5.0
    plate_w_cm: float = PLATE_WIDTH_CM
    plate_h_cm: float = PLATE_HEIGHT_CM
    size_tolerance: float = 0.5       # accept [tol * expected, expected / tol]
    aspect_ratio: float = PLATE_WIDTH_CM / PLATE_HEIGHT_CM
    aspect_tolerance: float = 0.4
    line_se_length: int = 25
    max_candidates: int = 5
    merge_se: tuple[int, int] = (3, 9)   # (height, width), wide to fuse a plate
    erode_se: tuple[int, int] = (3, 3)
    median_window: int = 5

    def __post_init__(self):
        if self.pixels_per_cm <= 0 or self.plate_w_cm <= 0 or self.plate_h_cm <= 0:
            raise ValueError("pixels_per_cm and plate dimensions must be positive")
        if not 0 < self.size_tolerance < 1:
            raise ValueError("size_tolerance must lie in (0, 1)")
        if self.aspect_tolerance <= 0 or self.aspect_ratio <= 0:
            raise ValueError("aspect settings must be positive")
        if self.line_se_length < 3 or self.line_se_length % 2 == 0:
            raise ValueError("line_se_length must be odd and >= 3")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")
        for name in ("merge_se", "erode_se"):
            h, w = getattr(self, name)
            if h < 1 or w < 1 or h % 2 == 0 or w % 2 == 0:
                raise ValueError(f"{name} dims must be odd and >= 1, got {(h, w)}")


@dataclass
class PlateCandidate:
    bbox: tuple[int, int, int, int]
    score: float
    fill_ratio: float
    aspect_error: float


def expected_plate_pixels(cfg: LocatorConfig) -> tuple[int, int]:
    """Expected plate size in pixels: resolution (px/cm) times plate cm."""
    w = int(np.floor(cfg.pixels_per_cm * cfg.plate_w_cm + 0.5))
    h = int(np.floor(cfg.pixels_per_cm * cfg.plate_h_cm + 0.5))
    return w, h


def eliminate_lines(img: np.ndarray, line_length: int = 25) -> np.ndarray:
    """Remove long runs that are thin in the perpendicular direction.

    A pixel is line-like when it survives opening with a long
    horizontal element or a long vertical one, but not both; solid
    two-dimensional blobs survive both openings and are kept intact.
    """
    open_h = opening(img, StructuringElement.hline(line_length))
    open_v = opening(img, StructuringElement.vline(line_length))
    return img & ~(open_h ^ open_v)


def filter_by_size(regions: list[Region], cfg: LocatorConfig) -> list[Region]:
    """Keep regions whose box fits the metric size and aspect gate."""
    w_px, h_px = expected_plate_pixels(cfg)
    tol = cfg.size_tolerance
    kept = []
    for r in regions:
        w, h = r.width, r.height
        if not (tol * w_px <= w <= w_px / tol):
            continue
        if not (tol * h_px <= h <= h_px / tol):
            continue
        if abs(w / h - cfg.aspect_ratio) > cfg.aspect_tolerance:
            continue
        kept.append(r)
    return kept


def _score(region: Region, cfg: LocatorConfig) -> tuple[float, float]:
    aspect_error = abs(region.width / region.height - cfg.aspect_ratio)
    score = (1.0 - min(1.0, aspect_error / cfg.aspect_tolerance)) * region.fill_ratio
    return score, aspect_error


def locate_with_stages(img: np.ndarray, cfg: LocatorConfig | None = None):
    """Run the localization chain, returning (candidates, stages).

    ``stages`` maps stage names (gray, edges, binary, dilated, median,
    filled, eroded, lines) to the intermediate arrays, in order.
    """
    cfg = cfg or LocatorConfig()
    arr = np.asarray(img)
    gray = to_gray(arr) if arr.ndim == 3 else check_gray_image(arr)
    if gray.shape[0] < 3 or gray.shape[1] < 3:
        raise ValueError("image must be at least 3x3")

    edges = sobel(gray)
    binary = otsu_threshold(edges)
    dilated = dilate(binary, StructuringElement.rectangle(*cfg.merge_se))
    median = mask_median_smooth(dilated, cfg.median_window)
    filled = fill_holes(median)
    eroded = erode(filled, StructuringElement.rectangle(*cfg.erode_se))
    lines = eliminate_lines(eroded, cfg.line_se_length)

    regions = connected_components(lines, connectivity=8)
    kept = filter_by_size(regions, cfg)
    scored = []
    for r in kept:
        score, aspect_error = _score(r, cfg)
        scored.append(PlateCandidate(r.bbox, score, r.fill_ratio, aspect_error))
    scored.sort(key=lambda c: (-c.score, -c.bbox[2] * c.bbox[3], c.bbox[1], c.bbox[0]))
    stages = {
        "gray": gray,
        "edges": edges,
        "binary": binary,
        "dilated": dilated,
        "median": median,
        "filled": filled,
        "eroded": eroded,
        "lines": lines,
    }
    return scored[: cfg.max_candidates], stages


def locate_plates(img: np.ndarray, cfg: LocatorConfig | None = None) -> list[PlateCandidate]:
    """Ranked plate candidates for an RGB or grayscale image."""
    return locate_with_stages(img, cfg)[0]


def crop(img: np.ndarray, bbox) -> np.ndarray:
    """Exact pixel copy of an (x, y, w, h) box; the box must be in bounds."""
    arr = np.asarray(img)
    x, y, w, h = check_bbox(bbox, arr.shape[1], arr.shape[0])
    return arr[y:y + h, x:x + w].copy()


def draw_box_outlines(gray: np.ndarray, boxes, value: int = 255) -> np.ndarray:
    """Burn 1-px box outlines into a copy of a gray image (stage dumps)."""
    out = check_gray_image(gray).copy()
    for bbox in boxes:
        x, y, w, h = check_bbox(bbox, out.shape[1], out.shape[0])
        out[y, x:x + w] = value
        out[y + h - 1, x:x + w] = value
        out[y:y + h, x] = value
        out[y:y + h, x + w - 1] = value
    return out


def stage_images(stages: dict) -> dict[str, np.ndarray]:
    """Render raw stage arrays to 8-bit images for inspection dumps."""
    out = {}
    for name, arr in stages.items():
        if arr.dtype == bool:
            out[name] = np.where(arr, 255, 0).astype(np.uint8)
        elif arr.dtype == np.uint8:
            out[name] = arr
        else:
            out[name] = rescale_to_gray(arr)
    return out


class PlateLocator(ParamsMixin):
    """Estimator-style wrapper around the localization chain.

    Stateless (no fit); ``detect`` maps an image to ranked candidates.
    Parameters mirror LocatorConfig and follow the scikit-learn
    get_params/set_params convention.
    """

    def __init__(self, pixels_per_cm=5.0, plate_w_cm=PLATE_WIDTH_CM,
                 plate_h_cm=PLATE_HEIGHT_CM, size_tolerance=0.5,
                 aspect_ratio=PLATE_WIDTH_CM / PLATE_HEIGHT_CM,
                 aspect_tolerance=0.4, line_se_length=25, max_candidates=5,
                 merge_se=(3, 9), erode_se=(3, 3), median_window=5):
        self.pixels_per_cm = pixels_per_cm
        self.plate_w_cm = plate_w_cm
        self.plate_h_cm = plate_h_cm
        self.size_tolerance = size_tolerance
        self.aspect_ratio = aspect_ratio
        self.aspect_tolerance = aspect_tolerance
        self.line_se_length = line_se_length
        self.max_candidates = max_candidates
        self.merge_se = merge_se
        self.erode_se = erode_se
        self.median_window = median_window

    def config(self) -> LocatorConfig:
        return LocatorConfig(**self.get_params())

    def detect(self, image) -> list[PlateCandidate]:
        return locate_plates(image, self.config())

    def detect_with_stages(self, image):
        return locate_with_stages(image, self.config())
