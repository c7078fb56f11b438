"""Composed networks: recurrent sequence regressors and dense MLPs.

Every network exposes ``parameters()`` / ``gradients()`` as ordered
name -> array mappings (live references, updated in place by the
optimizer) plus ``forward`` / ``backward`` / ``loss_and_gradients``.
"""

from collections import OrderedDict

import numpy as np

from optwin.errors import DimensionError
from optwin.nn.layers import Dense
from optwin.nn.losses import loss_and_grad
from optwin.nn.recurrent import BiRecurrent, make_cell


class Network:
    """Base for models made of layers with explicit backward passes."""

    def _modules(self):
        """Ordered (prefix, module) pairs; module has .params/.grads."""
        raise NotImplementedError

    def parameters(self):
        out = OrderedDict()
        for prefix, mod in self._modules():
            for k, v in mod.params.items():
                out[f"{prefix}.{k}"] = v
        return out

    def gradients(self):
        out = OrderedDict()
        for prefix, mod in self._modules():
            for k, v in mod.grads.items():
                out[f"{prefix}.{k}"] = v
        return out

    def zero_gradients(self):
        for _, mod in self._modules():
            for v in mod.grads.values():
                v.fill(0.0)

    def param_count(self):
        return sum(v.size for v in self.parameters().values())

    def forward(self, x, train=True):
        raise NotImplementedError

    def backward(self, dout):
        raise NotImplementedError

    def loss(self, x, targets, kind="mse"):
        val, _ = loss_and_grad(kind, self.forward(x, train=False), targets)
        return val

    def loss_and_gradients(self, x, targets, kind="mse"):
        """Zero grads, run forward + backward, return (loss, gradients)."""
        self.zero_gradients()
        out = self.forward(x, train=True)
        val, dout = loss_and_grad(kind, out, targets)
        self.backward(dout)
        return val, self.gradients()


class SequenceRegressor(Network):
    """Stack of bidirectional recurrent layers with a dense head read at
    one time step ("last" or "center").

    Input (batch, steps, input_size) -> output (batch, output_size).
    """

    def __init__(
        self,
        cell_kind,
        input_size,
        hidden_size,
        num_layers,
        output_size,
        head_index="last",
        head_activation="identity",
        seed=0,
        rng=None,
    ):
        if head_index not in ("last", "center"):
            raise ValueError("head_index must be 'last' or 'center'")
        if rng is None:
            rng = np.random.default_rng(seed)
        self.cell_kind = cell_kind
        self.input_size = input_size
        self.hidden_size = hidden_size
        self.num_layers = num_layers
        self.output_size = output_size
        self.head_index = head_index
        self.head_activation = head_activation
        self.layers = []
        width = input_size
        for _ in range(num_layers):
            self.layers.append(
                BiRecurrent(
                    make_cell(cell_kind, width, hidden_size, rng),
                    make_cell(cell_kind, width, hidden_size, rng),
                )
            )
            width = 2 * hidden_size
        self.head = Dense(width, output_size, head_activation, rng)
        self._feat_shape = None

    def _modules(self):
        mods = []
        for i, layer in enumerate(self.layers):
            for tag, cell in (("fwd", layer.cell_fwd), ("bwd", layer.cell_bwd)):
                mods.append((f"layer{i}.{tag}", cell))
        mods.append(("head", self.head))
        return mods

    def _read_index(self, steps):
        return steps - 1 if self.head_index == "last" else steps // 2

    def forward(self, x, train=True):
        h = np.asarray(x, dtype=np.float64)
        if h.ndim != 3 or h.shape[2] != self.input_size:
            raise DimensionError(
                f"expected (batch, steps, {self.input_size}), got {h.shape}"
            )
        for layer in self.layers:
            h = layer.forward(h, train=train)
        idx = self._read_index(h.shape[1])
        self._feat_shape = (h.shape, idx) if train else None
        return self.head.forward(h[:, idx, :], train=train)

    def backward(self, dout):
        dfeat = self.head.backward(dout)
        (shape, idx) = self._feat_shape
        dh = np.zeros(shape)
        dh[:, idx, :] = dfeat
        for layer in reversed(self.layers):
            dh = layer.backward(dh)
        return dh

    def config(self):
        return {
            "cell_kind": self.cell_kind,
            "input_size": self.input_size,
            "hidden_size": self.hidden_size,
            "num_layers": self.num_layers,
            "output_size": self.output_size,
            "head_index": self.head_index,
            "head_activation": self.head_activation,
        }

    @classmethod
    def from_config(cls, cfg):
        return cls(**cfg, seed=0)


class Mlp(Network):
    """Dense stack; ``sizes`` is [in, hidden..., out]."""

    def __init__(self, sizes, hidden_activation="relu", out_activation="identity", seed=0, rng=None):
        if rng is None:
            rng = np.random.default_rng(seed)
        self.sizes = list(sizes)
        self.hidden_activation = hidden_activation
        self.out_activation = out_activation
        self.layers = []
        for i in range(len(sizes) - 1):
            act = out_activation if i == len(sizes) - 2 else hidden_activation
            self.layers.append(Dense(sizes[i], sizes[i + 1], act, rng))

    def _modules(self):
        return [(f"dense{i}", l) for i, l in enumerate(self.layers)]

    def forward(self, x, train=True):
        h = np.asarray(x, dtype=np.float64)
        for layer in self.layers:
            h = layer.forward(h, train=train)
        return h

    def backward(self, dout):
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout

    def config(self):
        return {
            "sizes": self.sizes,
            "hidden_activation": self.hidden_activation,
            "out_activation": self.out_activation,
        }

    @classmethod
    def from_config(cls, cfg):
        return cls(**cfg, seed=0)


def copy_parameters(src, dst):
    """Copy parameters src -> dst in place (bit-exact)."""
    sp, dp = src.parameters(), dst.parameters()
    if list(sp.keys()) != list(dp.keys()):
        raise DimensionError("parameter sets do not match")
    for k in sp:
        if sp[k].shape != dp[k].shape:
            raise DimensionError(f"shape mismatch for {k}")
        dp[k][...] = sp[k]
