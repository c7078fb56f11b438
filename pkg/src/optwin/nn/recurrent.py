"""GRU and LSTM cells plus the bidirectional sequence runner.

Gate conventions (fixed so tests are unambiguous):

GRU, hidden h, input x:
    z = sigmoid(x Wz^T + h Uz^T + bz)          update gate
    r = sigmoid(x Wr^T + h Ur^T + br)          reset gate
    n = tanh(x Wn^T + (r*h) Un^T + bn)         candidate
    h' = z*h + (1-z)*n

z = 1 keeps the old state. Parameter count 3*(in+hid+1)*hid.

LSTM, hidden h, cell c:
    i, f, o = sigmoid(x W^T + h U^T + b)       input/forget/output gates
    g = tanh(x Wg^T + h Ug^T + bg)             candidate
    c' = f*c + i*g
    h' = o * tanh(c')

Parameter count 4*(in+hid+1)*hid.

``step`` runs one public, validated step. ``run_sequence`` /
``sequence_backward`` process whole sequences: input projections and all
weight gradients are batched into single GEMMs over (batch*steps), and
the per-step loop carries only the hidden recursion. Sequential and
single-step execution apply the same operations in the same order.
"""

from collections import OrderedDict

import numpy as np

from optwin.errors import DimensionError, NumericError, PreconditionError, StateError
from optwin.nn.layers import _sigmoid, uniform_init


def _check_seq_input(x, size):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or x.shape[2] != size:
        raise DimensionError(f"expected (batch, steps, {size}), got {x.shape}")
    if x.shape[1] == 0:
        raise PreconditionError("empty sequence")
    return x


class _CellBase:
    GATES = ()

    def __init__(self, input_size, hidden_size, rng=None):
        self.input_size = input_size
        self.hidden_size = hidden_size
        self.params = OrderedDict()
        for gate in self.GATES:
            if rng is None:
                w = np.zeros((hidden_size, input_size))
                u = np.zeros((hidden_size, hidden_size))
            else:
                w = uniform_init(rng, (hidden_size, input_size), input_size)
                u = uniform_init(rng, (hidden_size, hidden_size), hidden_size)
            self.params[f"w_{gate}"] = w
            self.params[f"u_{gate}"] = u
            self.params[f"b_{gate}"] = np.zeros(hidden_size)
        self.grads = OrderedDict(
            (k, np.zeros_like(v)) for k, v in self.params.items()
        )

    def param_count(self):
        return sum(p.size for p in self.params.values())

    def zero_grads(self):
        for v in self.grads.values():
            v.fill(0.0)

    def _x_projections(self, x_flat):
        """One GEMM per gate over the flattened (batch*steps) input."""
        p = self.params
        return {
            gate: x_flat @ p[f"w_{gate}"].T + p[f"b_{gate}"] for gate in self.GATES
        }

    def _accumulate_weight_grads(self, x_flat, h_prev_flat, das, extra=None):
        """Batched dW/dU/db accumulation; ``extra`` overrides the hidden
        operand for specific gates (GRU's candidate gate uses r*h)."""
        g = self.grads
        for gate in self.GATES:
            da = das[gate]
            g[f"w_{gate}"] += da.T @ x_flat
            hop = extra.get(gate) if extra and gate in extra else h_prev_flat
            g[f"u_{gate}"] += da.T @ hop
            g[f"b_{gate}"] += da.sum(axis=0)


class GRUCell(_CellBase):
    kind = "gru"
    GATES = ("update", "reset", "cand")

    def initial_state(self, batch):
        return np.zeros((batch, self.hidden_size))

    def step(self, x, state):
        """One gated step. Returns (hidden output, new state, cache)."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.input_size:
            raise DimensionError(
                f"gru input expects width {self.input_size}, got {x.shape}"
            )
        if not np.isfinite(x).all():
            raise NumericError("non-finite input to recurrent step")
        h = state
        p = self.params
        z = _sigmoid(x @ p["w_update"].T + p["b_update"] + h @ p["u_update"].T)
        r = _sigmoid(x @ p["w_reset"].T + p["b_reset"] + h @ p["u_reset"].T)
        rh = r * h
        n = np.tanh(x @ p["w_cand"].T + p["b_cand"] + rh @ p["u_cand"].T)
        h_new = z * h + (1.0 - z) * n
        return h_new, h_new, (x, h, z, r, rh, n)

    def step_backward(self, dh_out, dstate, cache):
        x, h, z, r, rh, n = cache
        p, g = self.params, self.grads
        d = dh_out if dstate is None else dh_out + dstate
        dh, daz, dar, dan = _gru_step_grads(p, d, h, z, r, n)
        g["w_update"] += daz.T @ x
        g["u_update"] += daz.T @ h
        g["b_update"] += daz.sum(axis=0)
        g["w_reset"] += dar.T @ x
        g["u_reset"] += dar.T @ h
        g["b_reset"] += dar.sum(axis=0)
        g["w_cand"] += dan.T @ x
        g["u_cand"] += dan.T @ rh
        g["b_cand"] += dan.sum(axis=0)
        dx = daz @ p["w_update"] + dar @ p["w_reset"] + dan @ p["w_cand"]
        return dx, dh

    def run_sequence(self, x, train=True):
        x = _check_seq_input(x, self.input_size)
        if not np.isfinite(x).all():
            raise NumericError("non-finite input to recurrent sequence")
        batch, steps, _ = x.shape
        hid = self.hidden_size
        p = self.params
        xt = np.ascontiguousarray(x.transpose(1, 0, 2))  # (T, B, F)
        proj = self._x_projections(xt.reshape(steps * batch, -1))
        az = proj["update"].reshape(steps, batch, hid)
        ar = proj["reset"].reshape(steps, batch, hid)
        an = proj["cand"].reshape(steps, batch, hid)
        uz, ur, un = p["u_update"], p["u_reset"], p["u_cand"]
        out = np.empty((steps, batch, hid))
        h = np.zeros((batch, hid))
        if train:
            hs = np.empty((steps, batch, hid))
            zs = np.empty((steps, batch, hid))
            rs = np.empty((steps, batch, hid))
            ns = np.empty((steps, batch, hid))
        cache = None
        for t in range(steps):
            z = _sigmoid(az[t] + h @ uz.T)
            r = _sigmoid(ar[t] + h @ ur.T)
            n = np.tanh(an[t] + (r * h) @ un.T)
            if train:
                hs[t], zs[t], rs[t], ns[t] = h, z, r, n
            h = z * h + (1.0 - z) * n
            out[t] = h
        if train:
            cache = (xt, hs, zs, rs, ns)
        return np.ascontiguousarray(out.transpose(1, 0, 2)), cache

    def sequence_backward(self, dout, cache):
        xt, hs, zs, rs, ns = cache
        steps, batch, hid = hs.shape
        p = self.params
        das_z = np.empty((steps, batch, hid))
        das_r = np.empty((steps, batch, hid))
        das_n = np.empty((steps, batch, hid))
        dh = np.zeros((batch, hid))
        for t in range(steps - 1, -1, -1):
            d = dout[:, t, :] + dh
            dh, das_z[t], das_r[t], das_n[t] = _gru_step_grads(
                p, d, hs[t], zs[t], rs[t], ns[t]
            )
        tb = steps * batch
        x_flat = xt.reshape(tb, -1)
        h_flat = hs.reshape(tb, hid)
        daz = das_z.reshape(tb, hid)
        dar = das_r.reshape(tb, hid)
        dan = das_n.reshape(tb, hid)
        self._accumulate_weight_grads(
            x_flat,
            h_flat,
            {"update": daz, "reset": dar, "cand": dan},
            extra={"cand": (rs.reshape(tb, hid) * h_flat)},
        )
        dx_flat = daz @ p["w_update"] + dar @ p["w_reset"] + dan @ p["w_cand"]
        dx = dx_flat.reshape(steps, batch, -1).transpose(1, 0, 2)
        return np.ascontiguousarray(dx)


def _gru_step_grads(p, d, h, z, r, n):
    """Shared single-step GRU backward: returns (dh_prev, daz, dar, dan)."""
    dn = d * (1.0 - z)
    dz = d * (h - n)
    dh = d * z
    dan = dn * (1.0 - n * n)
    daz = dz * z * (1.0 - z)
    drh = dan @ p["u_cand"]
    dh = dh + drh * r
    dar = (drh * h) * r * (1.0 - r)
    dh = dh + daz @ p["u_update"] + dar @ p["u_reset"]
    return dh, daz, dar, dan


class LSTMCell(_CellBase):
    kind = "lstm"
    GATES = ("input", "forget", "output", "cand")

    def initial_state(self, batch):
        return (
            np.zeros((batch, self.hidden_size)),
            np.zeros((batch, self.hidden_size)),
        )

    def step(self, x, state):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.input_size:
            raise DimensionError(
                f"lstm input expects width {self.input_size}, got {x.shape}"
            )
        if not np.isfinite(x).all():
            raise NumericError("non-finite input to recurrent step")
        h, c = state
        p = self.params
        i = _sigmoid(x @ p["w_input"].T + p["b_input"] + h @ p["u_input"].T)
        f = _sigmoid(x @ p["w_forget"].T + p["b_forget"] + h @ p["u_forget"].T)
        o = _sigmoid(x @ p["w_output"].T + p["b_output"] + h @ p["u_output"].T)
        g = np.tanh(x @ p["w_cand"].T + p["b_cand"] + h @ p["u_cand"].T)
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        return h_new, (h_new, c_new), (x, h, c, i, f, o, g, tc)

    def step_backward(self, dh_out, dstate, cache):
        x, h, c, i, f, o, g, tc = cache
        p, gr = self.params, self.grads
        if dstate is None:
            dh, dc = dh_out, np.zeros_like(dh_out)
        else:
            dh, dc = dh_out + dstate[0], dstate[1]
        dh_prev, dc_prev, das = _lstm_step_grads(p, dh, dc, c, i, f, o, g, tc)
        for gate, da in das.items():
            gr[f"w_{gate}"] += da.T @ x
            gr[f"u_{gate}"] += da.T @ h
            gr[f"b_{gate}"] += da.sum(axis=0)
        dx = sum(das[gate] @ p[f"w_{gate}"] for gate in self.GATES)
        return dx, (dh_prev, dc_prev)

    def run_sequence(self, x, train=True):
        x = _check_seq_input(x, self.input_size)
        if not np.isfinite(x).all():
            raise NumericError("non-finite input to recurrent sequence")
        batch, steps, _ = x.shape
        hid = self.hidden_size
        p = self.params
        xt = np.ascontiguousarray(x.transpose(1, 0, 2))
        proj = self._x_projections(xt.reshape(steps * batch, -1))
        ai = proj["input"].reshape(steps, batch, hid)
        af = proj["forget"].reshape(steps, batch, hid)
        ao = proj["output"].reshape(steps, batch, hid)
        ag = proj["cand"].reshape(steps, batch, hid)
        ui, uf, uo, ug = (
            p["u_input"], p["u_forget"], p["u_output"], p["u_cand"],
        )
        out = np.empty((steps, batch, hid))
        h = np.zeros((batch, hid))
        c = np.zeros((batch, hid))
        if train:
            hs = np.empty((steps, batch, hid))
            cs = np.empty((steps, batch, hid))
            is_ = np.empty((steps, batch, hid))
            fs = np.empty((steps, batch, hid))
            os_ = np.empty((steps, batch, hid))
            gs = np.empty((steps, batch, hid))
            tcs = np.empty((steps, batch, hid))
        cache = None
        for t in range(steps):
            i = _sigmoid(ai[t] + h @ ui.T)
            f = _sigmoid(af[t] + h @ uf.T)
            o = _sigmoid(ao[t] + h @ uo.T)
            g = np.tanh(ag[t] + h @ ug.T)
            if train:
                hs[t], cs[t] = h, c
                is_[t], fs[t], os_[t], gs[t] = i, f, o, g
            c = f * c + i * g
            tc = np.tanh(c)
            if train:
                tcs[t] = tc
            h = o * tc
            out[t] = h
        if train:
            cache = (xt, hs, cs, is_, fs, os_, gs, tcs)
        return np.ascontiguousarray(out.transpose(1, 0, 2)), cache

    def sequence_backward(self, dout, cache):
        xt, hs, cs, is_, fs, os_, gs, tcs = cache
        steps, batch, hid = hs.shape
        p = self.params
        store = {g: np.empty((steps, batch, hid)) for g in self.GATES}
        dh = np.zeros((batch, hid))
        dc = np.zeros((batch, hid))
        for t in range(steps - 1, -1, -1):
            dh_tot = dout[:, t, :] + dh
            dh, dc, das = _lstm_step_grads(
                p, dh_tot, dc, cs[t], is_[t], fs[t], os_[t], gs[t], tcs[t]
            )
            for gate in self.GATES:
                store[gate][t] = das[gate]
        tb = steps * batch
        x_flat = xt.reshape(tb, -1)
        h_flat = hs.reshape(tb, hid)
        das_flat = {g: store[g].reshape(tb, hid) for g in self.GATES}
        self._accumulate_weight_grads(x_flat, h_flat, das_flat)
        dx_flat = sum(das_flat[g] @ p[f"w_{g}"] for g in self.GATES)
        dx = dx_flat.reshape(steps, batch, -1).transpose(1, 0, 2)
        return np.ascontiguousarray(dx)


def _lstm_step_grads(p, dh, dc_in, c, i, f, o, g, tc):
    """Shared single-step LSTM backward."""
    do = dh * tc
    dtc = dh * o * (1.0 - tc * tc) + dc_in
    dc_prev = dtc * f
    das = {
        "input": (dtc * g) * i * (1.0 - i),
        "forget": (dtc * c) * f * (1.0 - f),
        "output": do * o * (1.0 - o),
        "cand": (dtc * i) * (1.0 - g * g),
    }
    dh_prev = sum(das[gate] @ p[f"u_{gate}"] for gate in das)
    return dh_prev, dc_prev, das


def make_cell(kind, input_size, hidden_size, rng=None):
    if kind == "gru":
        return GRUCell(input_size, hidden_size, rng)
    if kind == "lstm":
        return LSTMCell(input_size, hidden_size, rng)
    raise ValueError(f"unknown cell kind {kind!r}")


class BiRecurrent:
    """Bidirectional layer: per step, concat of forward hidden at t and
    backward hidden at t (the backward cell consumes the reversed
    sequence). Output feature width is 2*hidden_size.
    """

    def __init__(self, cell_fwd, cell_bwd):
        if cell_fwd.input_size != cell_bwd.input_size:
            raise DimensionError("forward/backward cells disagree on input size")
        if cell_fwd.hidden_size != cell_bwd.hidden_size:
            raise DimensionError("forward/backward cells disagree on hidden size")
        self.cell_fwd = cell_fwd
        self.cell_bwd = cell_bwd
        self.input_size = cell_fwd.input_size
        self.hidden_size = cell_fwd.hidden_size
        self.output_size = 2 * cell_fwd.hidden_size
        self._cache = None

    def forward(self, x, train=True):
        x = _check_seq_input(x, self.input_size)
        out_f, cache_f = self.cell_fwd.run_sequence(x, train=train)
        out_b, cache_b = self.cell_bwd.run_sequence(x[:, ::-1, :], train=train)
        out = np.concatenate([out_f, out_b[:, ::-1, :]], axis=2)
        self._cache = (cache_f, cache_b) if train else None
        return out

    def backward(self, dout):
        if self._cache is None:
            raise StateError("bidirectional backward called without cached forward")
        cache_f, cache_b = self._cache
        hid = self.hidden_size
        dx = self.cell_fwd.sequence_backward(
            np.ascontiguousarray(dout[:, :, :hid]), cache_f
        )
        dx_b = self.cell_bwd.sequence_backward(
            np.ascontiguousarray(dout[:, ::-1, hid:]), cache_b
        )
        dx += dx_b[:, ::-1, :]
        return dx

    def zero_grads(self):
        self.cell_fwd.zero_grads()
        self.cell_bwd.zero_grads()
