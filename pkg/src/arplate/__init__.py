"""arplate: Arabic (Egyptian) license plate localization and recognition.

A two-stage pipeline: morphological plate localization (Sobel edges,
Otsu binarization, dilation, median smoothing, hole filling, erosion,
line and size elimination) feeding a from-scratch convolutional
classifier over the 26-character plate alphabet, plus a deterministic
synthetic data generator and an evaluation harness.
"""

from .acr import (
    GlyphClassifier,
    IncompleteReadingError,
    PlateReading,
    assemble_reading,
    build_model,
    validate_reading,
)
from .base import NotFittedError
from .evalkit import EvalReport, evaluate, iou
from .locator import LocatorConfig, PlateCandidate, PlateLocator, locate_plates
from .reader import PlateReader
from .segmenter import CharBox, normalize_glyph, segment_chars, split_bands

__version__ = "0.1.0"

__all__ = [
    "CharBox",
    "EvalReport",
    "GlyphClassifier",
    "IncompleteReadingError",
    "LocatorConfig",
    "NotFittedError",
    "PlateCandidate",
    "PlateLocator",
    "PlateReader",
    "PlateReading",
    "assemble_reading",
    "build_model",
    "evaluate",
    "iou",
    "locate_plates",
    "normalize_glyph",
    "segment_chars",
    "split_bands",
    "validate_reading",
    "__version__",
]
