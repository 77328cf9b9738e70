"""Central finite-difference verification of analytic gradients."""
from __future__ import annotations

import numpy as np


def numeric_gradient(loss_fn, param: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Central differences of loss_fn w.r.t. every element of param.

    ``loss_fn`` takes no arguments and reads ``param`` in place, so the
    array is perturbed and restored element by element.
    """
    grad = np.zeros_like(param, dtype=np.float64)
    flat = param.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        hi = loss_fn()
        flat[i] = orig - eps
        lo = loss_fn()
        flat[i] = orig
        gflat[i] = (hi - lo) / (2 * eps)
    return grad


def max_relative_error(analytic: np.ndarray, numeric: np.ndarray,
                       floor: float = 1e-6) -> float:
    """max |a - n| / max(|a|, |n|, floor) over all elements."""
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
    return float((np.abs(a - n) / denom).max())


def check_network_gradients(net, x, labels, rng=None, eps: float = 1e-5):
    """Compare every parameter's backprop gradient to central differences.

    Dropout masks are sampled once and frozen for all evaluations.
    Returns the worst relative error across parameters.
    """
    masks = {}
    if rng is not None:
        for i, spec in enumerate(net.specs):
            if spec.kind == "dropout" and spec.rate:
                shape = _shape_at(net, i, np.asarray(x))
                masks[i] = rng.random(shape) >= spec.rate
    _, grads, _ = net.loss_and_grads(x, labels, masks=masks)

    def loss_fn():
        loss, _, _ = net.loss_and_grads(x, labels, masks=masks)
        return loss

    worst = 0.0
    for name, param in net.params.items():
        numeric = numeric_gradient(loss_fn, param, eps=eps)
        worst = max(worst, max_relative_error(grads[name], numeric))
    return worst


def _shape_at(net, layer_index, x):
    """Shape of the tensor entering layer_index during a forward pass."""
    h, _ = _truncated_forward(net, x, layer_index)
    return h.shape


def _truncated_forward(net, x, stop):
    from .network import Network  # local import to avoid a cycle

    body = Network.__new__(Network)
    body.specs = net.specs[:stop]
    body.input_shape = net.input_shape
    body.dtype = net.dtype
    body.params = net.params
    return body.forward(x, train=False)
