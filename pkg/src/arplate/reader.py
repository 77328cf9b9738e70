"""End-to-end plate reading: locate, segment, classify, assemble."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .acr import GlyphClassifier, IncompleteReadingError, PlateReading, assemble_reading
from .base import NotFittedError, ParamsMixin
from .locator import PlateCandidate, PlateLocator, crop
from .raster import to_gray
from .segmenter import segment_plate
from .validation import check_gray_image


@dataclass
class CandidateResult:
    candidate: PlateCandidate
    reading: PlateReading | None


class PlateReader(ParamsMixin):
    """Composes a PlateLocator and a fitted GlyphClassifier.

    ``process`` keeps every locator candidate (successful or not) so
    evaluation can count false positives; ``read`` returns just the
    successful readings in candidate order.
    """

    def __init__(self, locator: PlateLocator | None = None,
                 classifier: GlyphClassifier | None = None):
        self.locator = locator
        self.classifier = classifier

    def _parts(self):
        loc = self.locator if self.locator is not None else PlateLocator()
        if self.classifier is None:
            raise NotFittedError("PlateReader needs a fitted GlyphClassifier")
        return loc, self.classifier

    def read_plate(self, plate_gray: np.ndarray) -> PlateReading:
        """Decode an already-cropped plate image."""
        _, clf = self._parts()
        plate_gray = check_gray_image(plate_gray)
        boxes, glyphs = segment_plate(plate_gray)
        if not boxes:
            raise IncompleteReadingError("no characters found in plate crop")
        probs = clf.predict_proba(glyphs)
        return assemble_reading(boxes, probs)

    def process(self, image) -> list[CandidateResult]:
        loc, _ = self._parts()
        arr = np.asarray(image)
        gray = to_gray(arr) if arr.ndim == 3 else check_gray_image(arr)
        results = []
        for cand in loc.detect(gray):
            try:
                reading = self.read_plate(crop(gray, cand.bbox))
                reading.bbox = cand.bbox
            except (IncompleteReadingError, ValueError):
                reading = None
            results.append(CandidateResult(candidate=cand, reading=reading))
        return results

    def read(self, image) -> list[PlateReading]:
        return [r.reading for r in self.process(image) if r.reading is not None]
