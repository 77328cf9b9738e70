"""Layer specifications and the sequential network container."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ops

KINDS = ("conv", "maxpool", "dropout", "flatten", "dense", "relu", "softmax")


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    filters: int | None = None
    kernel: int | None = None
    units: int | None = None
    rate: float | None = None
    window: int | None = None
    stride: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}")
        if self.kind == "conv" and (not self.filters or not self.kernel):
            raise ValueError("conv layer needs filters and kernel")
        if self.kind == "dense" and not self.units:
            raise ValueError("dense layer needs units")
        if self.kind == "dropout" and not (self.rate is not None and 0 <= self.rate < 1):
            raise ValueError("dropout rate must be in [0, 1)")


def conv(filters: int, kernel: int = 3) -> LayerSpec:
    return LayerSpec("conv", filters=filters, kernel=kernel)


def maxpool(window: int = 2, stride: int | None = None) -> LayerSpec:
    return LayerSpec("maxpool", window=window, stride=stride or window)


def dropout(rate: float) -> LayerSpec:
    return LayerSpec("dropout", rate=rate)


def flatten() -> LayerSpec:
    return LayerSpec("flatten")


def dense(units: int) -> LayerSpec:
    return LayerSpec("dense", units=units)


def relu() -> LayerSpec:
    return LayerSpec("relu")


def softmax() -> LayerSpec:
    return LayerSpec("softmax")


def _walk_shapes(specs, input_shape):
    """Yield (spec, in_shape, out_shape) through the chain, validating it."""
    shape = tuple(input_shape)
    for spec in specs:
        if spec.kind == "conv":
            if len(shape) != 3:
                raise ValueError(f"conv expects (H, W, C) input, got {shape}")
            h, w, _ = shape
            out = (h, w, spec.filters)
        elif spec.kind == "maxpool":
            if len(shape) != 3:
                raise ValueError(f"maxpool expects (H, W, C) input, got {shape}")
            h, w, c = shape
            s = spec.stride
            out = ((h - spec.window) // s + 1, (w - spec.window) // s + 1, c)
            if out[0] < 1 or out[1] < 1:
                raise ValueError(f"pooling window {spec.window} too large for {shape}")
        elif spec.kind == "flatten":
            out = (int(np.prod(shape)),)
        elif spec.kind == "dense":
            if len(shape) != 1:
                raise ValueError(f"dense expects flat input, got {shape}")
            out = (spec.units,)
        else:  # relu, dropout, softmax keep the shape
            out = shape
        yield spec, shape, out
        shape = out


def output_shape(specs, input_shape):
    shape = tuple(input_shape)
    for _, _, shape in _walk_shapes(specs, input_shape):
        pass
    return shape


def param_count(specs, input_shape) -> int:
    """Learnable parameter total (kernels, matrices and biases)."""
    total = 0
    for spec, in_shape, _ in _walk_shapes(specs, input_shape):
        if spec.kind == "conv":
            total += spec.kernel * spec.kernel * in_shape[2] * spec.filters + spec.filters
        elif spec.kind == "dense":
            total += in_shape[0] * spec.units + spec.units
    return total


class Network:
    """A sequential net over LayerSpecs with explicit parameter storage.

    Parameters live in an ordered name -> array dict so they can be
    serialized and optimized generically.  A trailing softmax layer is
    fused with the cross-entropy loss during training.
    """

    def __init__(self, specs, input_shape, seed: int = 0, dtype=np.float64):
        self.specs = list(specs)
        self.input_shape = tuple(input_shape)
        self.dtype = dtype
        self.params: dict[str, np.ndarray] = {}
        rng = np.random.default_rng(seed)
        for i, (spec, in_shape, _) in enumerate(_walk_shapes(self.specs, input_shape)):
            if spec.kind == "conv":
                fan_in = spec.kernel * spec.kernel * in_shape[2]
                w = rng.normal(0, np.sqrt(2.0 / fan_in),
                               size=(spec.kernel, spec.kernel, in_shape[2], spec.filters))
                self.params[f"layer{i:02d}_conv_w"] = w.astype(dtype)
                self.params[f"layer{i:02d}_conv_b"] = np.zeros(spec.filters, dtype=dtype)
            elif spec.kind == "dense":
                fan_in = in_shape[0]
                w = rng.normal(0, np.sqrt(2.0 / fan_in), size=(fan_in, spec.units))
                self.params[f"layer{i:02d}_dense_w"] = w.astype(dtype)
                self.params[f"layer{i:02d}_dense_b"] = np.zeros(spec.units, dtype=dtype)

    def param_count(self) -> int:
        return sum(p.size for p in self.params.values())

    def _p(self, i, kind, which):
        return self.params[f"layer{i:02d}_{kind}_{which}"]

    def forward(self, x, train: bool = False, rng=None, masks=None):
        """Forward pass; returns (output, tape).

        ``masks`` optionally pins dropout masks by layer index (for
        gradient checking).  Inference mode never consumes randomness.
        """
        h = np.asarray(x, dtype=self.dtype)
        tape = []
        for i, spec in enumerate(self.specs):
            if spec.kind == "conv":
                h, cache = ops.conv_forward(h, self._p(i, "conv", "w"), self._p(i, "conv", "b"))
            elif spec.kind == "relu":
                h, cache = ops.relu(h)
            elif spec.kind == "maxpool":
                h, cache = ops.maxpool_forward(h, spec.window, spec.stride)
            elif spec.kind == "dropout":
                mask = None if masks is None else masks.get(i)
                h, cache = ops.dropout_forward(h, spec.rate, rng=rng, train=train, mask=mask)
            elif spec.kind == "flatten":
                h, cache = ops.flatten(h)
            elif spec.kind == "dense":
                h, cache = ops.dense_forward(h, self._p(i, "dense", "w"), self._p(i, "dense", "b"))
            elif spec.kind == "softmax":
                cache = None
                h = ops.softmax(h)
            tape.append(cache)
        return h, tape

    def _logits(self, x, train, rng, masks):
        specs = self.specs
        if specs and specs[-1].kind == "softmax":
            body = Network.__new__(Network)
            body.specs = specs[:-1]
            body.input_shape = self.input_shape
            body.dtype = self.dtype
            body.params = self.params
            return body.forward(x, train=train, rng=rng, masks=masks)
        return self.forward(x, train=train, rng=rng, masks=masks)

    def loss_and_grads(self, x, labels, rng=None, masks=None, train: bool = True):
        """Cross-entropy loss plus exact reverse-mode parameter gradients."""
        logits, tape = self._logits(x, train, rng, masks)
        probs = ops.softmax(logits)
        loss = ops.cross_entropy_loss(probs, labels)
        grads = {name: np.zeros_like(p) for name, p in self.params.items()}
        d = ops.softmax_cross_entropy_grad(probs, labels)
        body_specs = self.specs[:-1] if self.specs[-1].kind == "softmax" else self.specs
        for i in reversed(range(len(body_specs))):
            spec = body_specs[i]
            cache = tape[i]
            if spec.kind == "conv":
                d, dw, db = ops.conv_backward(d, self._p(i, "conv", "w"), cache)
                grads[f"layer{i:02d}_conv_w"] = dw
                grads[f"layer{i:02d}_conv_b"] = db
            elif spec.kind == "relu":
                d = ops.relu_backward(d, cache)
            elif spec.kind == "maxpool":
                d = ops.maxpool_backward(d, cache)
            elif spec.kind == "dropout":
                d = ops.dropout_backward(d, cache)
            elif spec.kind == "flatten":
                d = ops.flatten_backward(d, cache)
            elif spec.kind == "dense":
                d, dw, db = ops.dense_backward(d, self._p(i, "dense", "w"), cache)
                grads[f"layer{i:02d}_dense_w"] = dw
                grads[f"layer{i:02d}_dense_b"] = db
        return loss, grads, probs

    def predict_proba(self, x):
        """Deterministic inference-mode class probabilities."""
        out, _ = self.forward(x, train=False)
        if self.specs[-1].kind != "softmax":
            out = ops.softmax(out)
        return out

    def set_params_from(self, named: dict):
        for name, value in named.items():
            if name not in self.params:
                raise KeyError(f"unexpected tensor {name!r}")
            if self.params[name].shape != value.shape:
                raise ValueError(
                    f"tensor {name!r} has shape {value.shape}, expected "
                    f"{self.params[name].shape}"
                )
            self.params[name] = np.asarray(value, dtype=self.dtype)
