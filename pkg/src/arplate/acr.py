"""Arabic character recognition: presets, training loop, plate grammar.

Two architecture presets share the 32x32x1 input and 26-way softmax
head.  The full-size preset carries the ~20M parameter budget; the desk
preset (~270k parameters) trains to the same accuracy regime on the
synthetic corpus in well under a minute per run and is what the test
suite exercises end to end.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import labels, nn
from .base import NotFittedError, ParamsMixin
from .validation import check_glyph_batch

PRESETS = ("desk", "paper-replica")


@dataclass(frozen=True)
class ModelConfig:
    name: str
    specs: tuple
    input_shape: tuple = (32, 32, 1)
    n_classes: int = labels.N_CLASSES


@dataclass
class TrainConfig:
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 0
    validation_fraction: float = 0.1
    patience: int | None = None

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0 <= self.validation_fraction < 1:
            raise ValueError("validation_fraction must lie in [0, 1)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class EpochMetrics:
    epoch: int
    train_loss: float
    train_acc: float
    val_acc: float


def build_model(preset: str) -> ModelConfig:
    """Architecture preset: 'paper-replica' (~20M params) or 'desk'."""
    if preset == "paper-replica":
        specs = (
            nn.conv(128, 3), nn.relu(), nn.maxpool(2),
            nn.conv(256, 3), nn.relu(), nn.maxpool(2),
            nn.dropout(0.5), nn.flatten(),
            nn.dense(1200), nn.relu(),
            nn.dense(128), nn.relu(),
            nn.dense(26), nn.softmax(),
        )
    elif preset == "desk":
        specs = (
            nn.conv(16, 3), nn.relu(), nn.maxpool(2),
            nn.conv(32, 3), nn.relu(), nn.maxpool(2),
            nn.dropout(0.25), nn.flatten(),
            nn.dense(128), nn.relu(),
            nn.dense(26), nn.softmax(),
        )
    else:
        raise ValueError(f"unknown preset {preset!r}; choose from {PRESETS}")
    return ModelConfig(name=preset, specs=specs)


def _accuracy(probs: np.ndarray, y: np.ndarray) -> float:
    return float((probs.argmax(axis=1) == y).mean())


def train(X, y, model_cfg: ModelConfig, cfg: TrainConfig):
    """Train on glyphs (n, 32, 32) in [0, 1]; returns (weights, metrics).

    Shuffling, initialization and dropout all derive from cfg.seed, so
    a rerun reproduces the metrics log and weights bit for bit.  The
    returned weights are float32 master copies of the epoch with the
    best validation accuracy (final epoch when there is no split).
    """
    X = check_glyph_batch(X)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] != y.shape[0]:
        raise ValueError("sample and label counts differ")
    present = np.bincount(y, minlength=model_cfg.n_classes)
    if y.size and (y.min() < 0 or y.max() >= model_cfg.n_classes):
        raise ValueError("label out of range")
    missing = np.flatnonzero(present == 0)
    if missing.size:
        raise ValueError(f"no samples for class ids {missing.tolist()}")

    rng = np.random.default_rng(cfg.seed)
    net = nn.Network(model_cfg.specs, model_cfg.input_shape, seed=cfg.seed)
    opt = nn.Adam(learning_rate=cfg.learning_rate)

    n = X.shape[0]
    order = rng.permutation(n)
    n_val = int(round(cfg.validation_fraction * n))
    val_idx, train_idx = order[:n_val], order[n_val:]
    if train_idx.size == 0:
        raise ValueError("validation split leaves no training samples")
    Xt = X[train_idx][..., None]
    yt = y[train_idx]
    Xv = X[val_idx][..., None]
    yv = y[val_idx]

    metrics: list[EpochMetrics] = []
    best = (-1.0, None)
    stale = 0
    for epoch in range(1, cfg.epochs + 1):
        perm = rng.permutation(train_idx.size)
        losses = []
        hits = 0
        for start in range(0, perm.size, cfg.batch_size):
            sel = perm[start:start + cfg.batch_size]
            loss, grads, probs = net.loss_and_grads(Xt[sel], yt[sel], rng=rng)
            if not np.isfinite(loss):
                raise nn.NonFiniteGradientError(f"loss became non-finite at epoch {epoch}")
            opt.step(net.params, grads)
            losses.append(loss * sel.size)
            hits += int((probs.argmax(axis=1) == yt[sel]).sum())
        train_loss = float(np.sum(losses) / perm.size)
        train_acc = hits / perm.size
        val_acc = _accuracy(net.predict_proba(Xv), yv) if n_val else train_acc
        metrics.append(EpochMetrics(epoch, train_loss, train_acc, val_acc))
        if val_acc > best[0]:
            best = (val_acc, {k: v.astype(np.float32) for k, v in net.params.items()})
            stale = 0
        else:
            stale += 1
            if cfg.patience is not None and stale >= cfg.patience:
                break
    weights = best[1]
    return weights, metrics


def predict(glyph, weights: dict, model_cfg: ModelConfig):
    """Classify one normalized glyph; returns (class_id, probabilities)."""
    glyph = check_glyph_batch(glyph)[0]
    net = nn.Network(model_cfg.specs, model_cfg.input_shape, seed=0, dtype=np.float32)
    net.set_params_from(weights)
    probs = net.predict_proba(glyph[..., None])
    return int(probs.argmax()), probs


def write_metrics(metrics, path) -> None:
    """Tab-separated per-epoch log: epoch, loss, train_acc, val_acc."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch\tloss\ttrain_acc\tval_acc\n")
        for m in metrics:
            fh.write(f"{m.epoch}\t{m.train_loss:.6f}\t{m.train_acc:.6f}\t{m.val_acc:.6f}\n")


class GlyphClassifier(ParamsMixin):
    """Estimator over normalized 32x32 glyphs with sklearn conventions.

    fit(X, y) trains from scratch; predict/predict_proba run in
    inference mode and are deterministic.  Weights master copies are
    float32, so save -> load roundtrips bit-exactly and reloading does
    not change predictions.
    """

    def __init__(self, preset: str = "desk", epochs: int = 100, batch_size: int = 32,
                 learning_rate: float = 1e-3, seed: int = 0,
                 validation_fraction: float = 0.1, patience: int | None = None):
        self.preset = preset
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.seed = seed
        self.validation_fraction = validation_fraction
        self.patience = patience

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs, batch_size=self.batch_size,
            learning_rate=self.learning_rate, seed=self.seed,
            validation_fraction=self.validation_fraction, patience=self.patience,
        )

    def fit(self, X, y):
        model_cfg = build_model(self.preset)
        weights, metrics = train(X, y, model_cfg, self._train_config())
        self.model_config_ = model_cfg
        self.weights_ = weights
        self.metrics_ = metrics
        self.n_iter_ = len(metrics)
        self.classes_ = np.arange(labels.N_CLASSES)
        self._net = self._build_net(model_cfg, weights)
        return self

    @staticmethod
    def _build_net(model_cfg, weights):
        net = nn.Network(model_cfg.specs, model_cfg.input_shape, seed=0, dtype=np.float32)
        net.set_params_from(weights)
        return net

    def _check_fitted(self):
        if not hasattr(self, "weights_"):
            raise NotFittedError("GlyphClassifier is not fitted; call fit or load")

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        X = check_glyph_batch(X)
        return self._net.predict_proba(X[..., None])

    def predict(self, X) -> np.ndarray:
        return self.predict_proba(X).argmax(axis=1)

    def score(self, X, y) -> float:
        y = np.asarray(y, dtype=np.int64)
        return float((self.predict(X) == y).mean())

    def save(self, path) -> None:
        self._check_fitted()
        nn.save_weights(self.weights_, path)

    @classmethod
    def load(cls, path, preset: str | None = None) -> "GlyphClassifier":
        """Rebuild a fitted classifier from an ACRW file.

        When preset is omitted it is inferred by matching tensor names
        and shapes against the known presets.
        """
        weights = nn.load_weights(path)
        if preset is None:
            preset = _infer_preset(weights)
        clf = cls(preset=preset)
        model_cfg = build_model(preset)
        expected = nn.Network(model_cfg.specs, model_cfg.input_shape, seed=0,
                              dtype=np.float32)
        clf.model_config_ = model_cfg
        clf.weights_ = weights
        clf.metrics_ = []
        clf.classes_ = np.arange(labels.N_CLASSES)
        expected.set_params_from(weights)
        clf._net = expected
        return clf


def _infer_preset(weights: dict) -> str:
    for preset in PRESETS:
        cfg = build_model(preset)
        net = nn.Network(cfg.specs, cfg.input_shape, seed=0, dtype=np.float32)
        if set(net.params) == set(weights) and all(
            net.params[k].shape == weights[k].shape for k in weights
        ):
            return preset
    raise ValueError("weight file does not match any known preset")


class IncompleteReadingError(ValueError):
    """A plate reading is missing its digit or letter zone entirely."""


@dataclass
class PlateReading:
    digits: str
    letters: str
    latin: str
    confidences: list[float] = field(default_factory=list)
    bbox: tuple[int, int, int, int] | None = None

    @property
    def confidence(self) -> float:
        return float(np.mean(self.confidences)) if self.confidences else 0.0


def assemble_reading(boxes, probabilities, bbox=None) -> PlateReading:
    """Combine per-box class probabilities into a structured reading.

    Decoding is constrained to the zone grammar: a box in the digit
    zone takes the best digit class even if a letter class has higher
    raw probability, and vice versa.
    """
    boxes = sorted(boxes, key=lambda b: b.order_index)
    probabilities = list(probabilities)
    if len(boxes) != len(probabilities):
        raise ValueError("box and probability counts differ")
    digits = []
    letters = []
    confidences = []
    for box, probs in zip(boxes, probabilities):
        probs = np.asarray(probs, dtype=np.float64)
        if box.band == "digit":
            ids = labels.DIGIT_IDS
        elif box.band == "letter":
            ids = labels.LETTER_IDS
        else:
            raise ValueError(f"unknown band {box.band!r}")
        best = ids[int(np.argmax(probs[list(ids)]))]
        confidences.append(float(probs[best]))
        (digits if box.band == "digit" else letters).append(labels.id_to_char(best))
    if not digits or not letters:
        raise IncompleteReadingError("reading needs at least one digit and one letter")
    digit_str = "".join(digits)
    letter_str = "".join(letters)
    latin = f"{labels.transliterate(digit_str)} {labels.transliterate(letter_str)}"
    return PlateReading(digits=digit_str, letters=letter_str, latin=latin,
                        confidences=confidences, bbox=bbox)


def validate_reading(reading: PlateReading) -> list[str]:
    """Plate grammar check; returns violations (empty list = valid).

    Registration numbers carry 3 digits (Cairo) or 4 (other
    governorates) from 1-9, never zero, plus 2 letters (Giza) or 3 from
    the restricted 17-letter alphabet.
    """
    violations = []
    if len(reading.digits) not in (3, 4):
        violations.append(f"digit count {len(reading.digits)} not in {{3, 4}}")
    if len(reading.letters) not in (2, 3):
        violations.append(f"letter count {len(reading.letters)} not in {{2, 3}}")
    for c in reading.digits:
        if c not in labels.DIGITS:
            violations.append(f"digit {c!r} outside ١-٩")
    for c in reading.letters:
        if c not in labels.LETTERS:
            violations.append(f"letter {c!r} outside the 17-letter plate alphabet")
    return violations
