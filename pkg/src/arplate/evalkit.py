"""Scene-set evaluation: recognition rate, false positives/negatives,
per-character confusion and localization overlap statistics.

A scene counts as recognized when the top candidate overlaps the truth
box with IoU >= 0.5 and the decoded digits and letters match exactly.
A candidate with IoU < 0.1 against the truth is a false positive; a
scene with no candidate reaching IoU 0.5 is a false negative.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import labels

RECOGNIZED_IOU = 0.5
FALSE_POSITIVE_IOU = 0.1


def iou(a, b) -> float:
    """Intersection over union of two (x, y, w, h) boxes."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    if aw <= 0 or ah <= 0 or bw <= 0 or bh <= 0:
        raise ValueError("boxes must have positive size")
    ix = max(0.0, min(ax + aw, bx + bw) - max(ax, bx))
    iy = max(0.0, min(ay + ah, by + bh) - max(ay, by))
    inter = ix * iy
    union = aw * ah + bw * bh - inter
    return inter / union if union else 0.0


@dataclass
class EvalReport:
    n_scenes: int
    recognition_rate: float
    false_positives: int
    false_negatives: int
    char_accuracy: float
    confusion: np.ndarray  # (26, 26) truth x predicted counts
    iou_values: list[float] = field(default_factory=list)

    @property
    def fp_per_scene(self) -> float:
        return self.false_positives / self.n_scenes if self.n_scenes else 0.0

    def iou_at_least(self, threshold: float) -> float:
        if not self.iou_values:
            return 0.0
        return float(np.mean(np.asarray(self.iou_values) >= threshold))

    def to_dict(self) -> dict:
        return {
            "n_scenes": self.n_scenes,
            "recognition_rate": self.recognition_rate,
            "false_positives": self.false_positives,
            "false_negatives": self.false_negatives,
            "fp_per_scene": self.fp_per_scene,
            "char_accuracy": self.char_accuracy,
            "iou_mean": float(np.mean(self.iou_values)) if self.iou_values else 0.0,
            "iou_ge_05_rate": self.iou_at_least(0.5),
            "iou_ge_07_rate": self.iou_at_least(0.7),
            "confusion": self.confusion.tolist(),
        }

    def format_table(self) -> str:
        rows = [
            ("scenes", f"{self.n_scenes}"),
            ("recognition rate", f"{self.recognition_rate:.4f}"),
            ("false positives", f"{self.false_positives}"),
            ("false negatives", f"{self.false_negatives}"),
            ("FP per scene", f"{self.fp_per_scene:.4f}"),
            ("char accuracy", f"{self.char_accuracy:.4f}"),
            ("IoU >= 0.7 rate", f"{self.iou_at_least(0.7):.4f}"),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def evaluate(samples, reader) -> EvalReport:
    """Evaluate (image, SceneTruth) pairs with a PlateReader-like object.

    ``reader.process(image)`` must yield candidate results in rank
    order.  Scene order does not affect the aggregate report.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("no scenes to evaluate")
    recognized = 0
    false_positives = 0
    false_negatives = 0
    char_hits = 0
    char_total = 0
    confusion = np.zeros((labels.N_CLASSES, labels.N_CLASSES), dtype=np.int64)
    ious = []
    for image, truth in samples:
        results = reader.process(image)
        overlaps = [iou(r.candidate.bbox, truth.bbox) for r in results]
        false_positives += sum(o < FALSE_POSITIVE_IOU for o in overlaps)
        if not any(o >= RECOGNIZED_IOU for o in overlaps):
            false_negatives += 1
        top_iou = overlaps[0] if overlaps else 0.0
        ious.append(top_iou)
        if not results:
            continue
        top = results[0]
        if top_iou >= RECOGNIZED_IOU and top.reading is not None:
            reading = top.reading
            if reading.digits == truth.digits and reading.letters == truth.letters:
                recognized += 1
            truth_chars = truth.digits + truth.letters
            pred_chars = reading.digits + reading.letters
            if len(truth_chars) == len(pred_chars):
                for t, p in zip(truth_chars, pred_chars):
                    ti = labels.char_to_id(t)
                    pi = labels.char_to_id(p)
                    confusion[ti, pi] += 1
                    char_total += 1
                    char_hits += t == p
    return EvalReport(
        n_scenes=len(samples),
        recognition_rate=recognized / len(samples),
        false_positives=false_positives,
        false_negatives=false_negatives,
        char_accuracy=char_hits / char_total if char_total else 0.0,
        confusion=confusion,
        iou_values=ious,
    )
