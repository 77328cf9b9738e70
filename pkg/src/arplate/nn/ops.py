"""Functional layer operations with explicit backward passes.

Tensors are numpy arrays in channels-last layout.  Every forward
returns the output plus whatever cache its backward needs, so a network
container can replay the tape in reverse.  Ops accept a single sample
(H, W, C) or a batch (N, H, W, C); vector ops accept (d,) or (N, d).

Convolution is cross-correlation (kernels are not flipped) with zero
padding; "same" padding at stride 1 preserves height and width.
"""
from __future__ import annotations

import numpy as np


def _batched(x, rank):
    x = np.asarray(x)
    if x.ndim == rank:
        return x[None], True
    if x.ndim == rank + 1:
        return x, False
    raise ValueError(f"expected rank {rank} or {rank + 1} tensor, got shape {x.shape}")


def _pad_amount(k: int, padding: str) -> tuple[int, int]:
    if padding == "same":
        return k // 2, (k - 1) // 2
    if padding == "valid":
        return 0, 0
    raise ValueError(f"unknown padding {padding!r}")


def conv_forward(x, kernels, bias, stride: int = 1, padding: str = "same"):
    """Cross-correlate (N, H, W, Cin) with (kh, kw, Cin, Cout) kernels.

    Returns (y, cache).  Implemented as im2col + one matmul.
    """
    xb, squeeze = _batched(x, 3)
    kernels = np.asarray(kernels)
    bias = np.asarray(bias)
    kh, kw, cin, cout = kernels.shape
    if xb.shape[3] != cin:
        raise ValueError(f"input has {xb.shape[3]} channels, kernels expect {cin}")
    if bias.shape != (cout,):
        raise ValueError(f"bias shape {bias.shape} does not match {cout} filters")
    pt, pb = _pad_amount(kh, padding)
    pl, pr = _pad_amount(kw, padding)
    xp = np.pad(xb, ((0, 0), (pt, pb), (pl, pr), (0, 0)))
    n, hp, wp, _ = xp.shape
    oh = (hp - kh) // stride + 1
    ow = (wp - kw) // stride + 1
    cols = np.empty((n, oh, ow, kh, kw, cin), dtype=xp.dtype)
    for dy in range(kh):
        for dx in range(kw):
            cols[:, :, :, dy, dx, :] = xp[:, dy:dy + oh * stride:stride,
                                          dx:dx + ow * stride:stride, :]
    flat = cols.reshape(n * oh * ow, kh * kw * cin)
    y = flat @ kernels.reshape(kh * kw * cin, cout) + bias
    y = y.reshape(n, oh, ow, cout)
    cache = (flat, xp.shape, xb.shape, kernels.shape, stride, (pt, pb, pl, pr), squeeze)
    return (y[0] if squeeze else y), cache


def conv_backward(dy, kernels, cache):
    """Gradients of conv_forward: returns (dx, dkernels, dbias)."""
    flat, xp_shape, x_shape, k_shape, stride, pads, squeeze = cache
    kh, kw, cin, cout = k_shape
    dyb = dy[None] if squeeze else dy
    n, oh, ow, _ = dyb.shape
    dy2 = dyb.reshape(n * oh * ow, cout)
    dkernels = (flat.T @ dy2).reshape(k_shape)
    dbias = dy2.sum(axis=0)
    dcols = (dy2 @ kernels.reshape(kh * kw * cin, cout).T)
    dcols = dcols.reshape(n, oh, ow, kh, kw, cin)
    dxp = np.zeros(xp_shape, dtype=dy2.dtype)
    for ddy in range(kh):
        for ddx in range(kw):
            dxp[:, ddy:ddy + oh * stride:stride,
                ddx:ddx + ow * stride:stride, :] += dcols[:, :, :, ddy, ddx, :]
    pt, pb, pl, pr = pads
    h, w = x_shape[1], x_shape[2]
    dx = dxp[:, pt:pt + h, pl:pl + w, :]
    return (dx[0] if squeeze else dx), dkernels, dbias


def maxpool_forward(x, window: int = 2, stride: int = 2):
    """Channel-wise window max; trailing rows/cols that do not fill a
    window are truncated.  Ties resolve to the first (row-major) element
    so the backward routing is deterministic.
    """
    xb, squeeze = _batched(x, 3)
    n, h, w, c = xb.shape
    oh = (h - window) // stride + 1
    ow = (w - window) // stride + 1
    if oh < 1 or ow < 1:
        raise ValueError(f"input {h}x{w} smaller than pooling window {window}")
    wins = np.empty((n, oh, ow, c, window * window), dtype=xb.dtype)
    i = 0
    for dy in range(window):
        for dx in range(window):
            wins[..., i] = xb[:, dy:dy + oh * stride:stride, dx:dx + ow * stride:stride, :]
            i += 1
    arg = wins.argmax(axis=-1)  # first max in row-major window order
    y = np.take_along_axis(wins, arg[..., None], axis=-1)[..., 0]
    cache = (arg, (n, h, w, c), window, stride, squeeze)
    return (y[0] if squeeze else y), cache


def maxpool_backward(dy, cache):
    arg, x_shape, window, stride, squeeze = cache
    dyb = dy[None] if squeeze else dy
    n, h, w, c = x_shape
    _, oh, ow, _ = dyb.shape
    dx = np.zeros(x_shape, dtype=dyb.dtype)
    ni, oy, ox, ci = np.indices((n, oh, ow, c))
    wy = arg // window
    wx = arg % window
    np.add.at(dx, (ni, oy * stride + wy, ox * stride + wx, ci), dyb)
    return dx[0] if squeeze else dx


def dropout_forward(x, rate: float, rng=None, train: bool = False, mask=None):
    """Inverted dropout: train zeroes with probability ``rate`` and
    rescales survivors by 1/(1-rate); inference is the identity.

    A precomputed mask can be passed to freeze the randomness (used by
    the finite-difference checks).
    """
    x = np.asarray(x)
    if not 0 <= rate < 1:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not train or rate == 0:
        return x.copy(), None
    if mask is None:
        if rng is None:
            raise ValueError("training-mode dropout needs an rng or a mask")
        mask = rng.random(x.shape) >= rate
    scale = 1.0 / (1.0 - rate)
    return x * mask * scale, (mask, scale)


def dropout_backward(dy, cache):
    if cache is None:
        return np.asarray(dy).copy()
    mask, scale = cache
    return dy * mask * scale


def flatten(x):
    """Row-major reshape to a vector (per sample for batched input)."""
    x = np.asarray(x)
    if x.ndim <= 1:
        return x.copy(), x.shape
    if x.ndim == 3:  # single sample
        return x.reshape(-1), x.shape
    return x.reshape(x.shape[0], -1), x.shape


def flatten_backward(dy, x_shape):
    return np.asarray(dy).reshape(x_shape)


def relu(x):
    x = np.asarray(x)
    return np.maximum(x, 0), x


def relu_backward(dy, x):
    return dy * (x > 0)


def dense_forward(x, w, b, activation: str | None = None):
    """x @ w + b with an optional 'relu' activation folded in."""
    xb, squeeze = _batched(x, 1)
    w = np.asarray(w)
    b = np.asarray(b)
    if xb.shape[1] != w.shape[0]:
        raise ValueError(f"input dim {xb.shape[1]} does not match weight dim {w.shape[0]}")
    z = xb @ w + b
    if activation == "relu":
        y = np.maximum(z, 0)
    elif activation is None:
        y = z
    else:
        raise ValueError(f"unknown activation {activation!r}")
    cache = (xb, z, activation, squeeze)
    return (y[0] if squeeze else y), cache


def dense_backward(dy, w, cache):
    xb, z, activation, squeeze = cache
    dyb = dy[None] if squeeze else dy
    if activation == "relu":
        dyb = dyb * (z > 0)
    dw = xb.T @ dyb
    db = dyb.sum(axis=0)
    dx = dyb @ np.asarray(w).T
    return (dx[0] if squeeze else dx), dw, db


def softmax(x):
    """Shift-invariant softmax along the last axis."""
    x = np.asarray(x, dtype=np.float64)
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy_loss(probs, labels):
    """Mean negative log-likelihood with the picked probability floored
    at 1e-12.  ``labels`` is an int or an int vector matching the batch.
    """
    probs = np.asarray(probs)
    if probs.ndim == 1:
        label = int(labels)
        if not 0 <= label < probs.shape[0]:
            raise ValueError(f"label {label} out of range for {probs.shape[0]} classes")
        return -float(np.log(max(probs[label], 1e-12)))
    labels = np.asarray(labels, dtype=np.int64)
    if labels.min() < 0 or labels.max() >= probs.shape[1]:
        raise ValueError("label out of range")
    picked = probs[np.arange(probs.shape[0]), labels]
    return -float(np.mean(np.log(np.maximum(picked, 1e-12))))


def softmax_cross_entropy_grad(probs, labels):
    """Gradient of mean cross-entropy at the logits: (probs - onehot) / N."""
    probs = np.asarray(probs)
    if probs.ndim == 1:
        g = probs.copy()
        g[int(labels)] -= 1.0
        return g
    g = probs.copy()
    g[np.arange(probs.shape[0]), np.asarray(labels, dtype=np.int64)] -= 1.0
    return g / probs.shape[0]
