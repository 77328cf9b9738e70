"""Minimal tensor layer zoo with backprop, Adam and the ACRW format."""

from .gradcheck import check_network_gradients, max_relative_error, numeric_gradient
from .network import (
    LayerSpec,
    Network,
    conv,
    dense,
    dropout,
    flatten,
    maxpool,
    output_shape,
    param_count,
    relu,
    softmax,
)
from .optim import Adam, NonFiniteGradientError
from .weights import (
    AcrwError,
    AcrwMagicError,
    AcrwTruncatedError,
    AcrwVersionError,
    load_weights,
    save_weights,
)
from . import ops

__all__ = [
    "Adam",
    "AcrwError",
    "AcrwMagicError",
    "AcrwTruncatedError",
    "AcrwVersionError",
    "LayerSpec",
    "Network",
    "NonFiniteGradientError",
    "check_network_gradients",
    "conv",
    "dense",
    "dropout",
    "flatten",
    "load_weights",
    "max_relative_error",
    "maxpool",
    "numeric_gradient",
    "ops",
    "output_shape",
    "param_count",
    "relu",
    "save_weights",
    "softmax",
]
