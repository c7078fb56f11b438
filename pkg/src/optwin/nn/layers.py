"""Dense layer and activation functions."""

from collections import OrderedDict

import numpy as np

from optwin.errors import DimensionError, StateError


def uniform_init(rng, shape, fan_in):
    """Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)]."""
    limit = 1.0 / np.sqrt(float(fan_in))
    return rng.uniform(-limit, limit, size=shape)


def _identity(x):
    return x


def _relu(x):
    return np.maximum(x, 0.0)


def _sigmoid(x):
    # overflow-free via the tanh identity
    return 0.5 * (np.tanh(0.5 * x) + 1.0)


ACTIVATIONS = {
    "identity": (_identity, lambda pre, out: 1.0),
    "relu": (_relu, lambda pre, out: (pre > 0).astype(np.float64)),
    "tanh": (np.tanh, lambda pre, out: 1.0 - out * out),
    "sigmoid": (_sigmoid, lambda pre, out: out * (1.0 - out)),
}


class Dense:
    """Affine map y = act(x W^T + b) applied per batch row.

    weight has shape (out_size, in_size); bias (out_size,).
    """

    def __init__(self, in_size, out_size, activation="identity", rng=None):
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        self.in_size = in_size
        self.out_size = out_size
        self.activation = activation
        if rng is None:
            weight = np.zeros((out_size, in_size))
        else:
            weight = uniform_init(rng, (out_size, in_size), in_size)
        self.params = OrderedDict(weight=weight, bias=np.zeros(out_size))
        self.grads = OrderedDict(
            weight=np.zeros_like(weight), bias=np.zeros(out_size)
        )
        self._cache = None

    def forward(self, x, train=True):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.in_size:
            raise DimensionError(
                f"dense expects (batch, {self.in_size}), got {x.shape}"
            )
        pre = x @ self.params["weight"].T + self.params["bias"]
        act, _ = ACTIVATIONS[self.activation]
        out = act(pre)
        self._cache = (x, pre, out) if train else None
        return out

    def backward(self, dout):
        if self._cache is None:
            raise StateError("dense backward called without cached forward")
        x, pre, out = self._cache
        _, dact = ACTIVATIONS[self.activation]
        dpre = dout * dact(pre, out)
        self.grads["weight"] += dpre.T @ x
        self.grads["bias"] += dpre.sum(axis=0)
        return dpre @ self.params["weight"]

    def zero_grads(self):
        for g in self.grads.values():
            g.fill(0.0)
