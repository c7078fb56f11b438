"""Layer, cell, and bidirectional-runner contracts.

The GRU check uses an independently hand-coded straight-line gate oracle;
the two implementations must agree to 1e-12.
"""

import numpy as np
import numpy.testing as npt
import pytest

from optwin.errors import DimensionError, NumericError, PreconditionError
from optwin.nn import BiRecurrent, Dense, GRUCell, LSTMCell
from optwin.nn.recurrent import make_cell


def _sig(x):
    return 1.0 / (1.0 + np.exp(-x))


def gru_oracle(params, x, h):
    """Straight-line transcription of the documented gate equations."""
    z = _sig(x @ params["w_update"].T + h @ params["u_update"].T + params["b_update"])
    r = _sig(x @ params["w_reset"].T + h @ params["u_reset"].T + params["b_reset"])
    n = np.tanh(x @ params["w_cand"].T + (r * h) @ params["u_cand"].T + params["b_cand"])
    return z * h + (1.0 - z) * n


class TestDense:
    def test_zero_weight_identity_gives_bias(self):
        layer = Dense(3, 2, "identity")
        layer.params["bias"][:] = [0.5, -1.5]
        out = layer.forward(np.random.default_rng(0).normal(size=(4, 3)))
        npt.assert_array_equal(out, np.tile([0.5, -1.5], (4, 1)))

    def test_relu_clips_negative_preactivation(self):
        layer = Dense(1, 1, "relu")
        layer.params["weight"][:] = [[1.0]]
        layer.params["bias"][:] = [-2.0]
        out = layer.forward(np.array([[1.0]]))
        assert out[0, 0] == 0.0

    def test_hand_computed_affine(self):
        # 2*3 + 1 = 7
        layer = Dense(1, 1, "identity")
        layer.params["weight"][:] = [[2.0]]
        layer.params["bias"][:] = [1.0]
        npt.assert_allclose(layer.forward(np.array([[3.0]])), [[7.0]])

    def test_shape_mismatch_raises(self):
        layer = Dense(3, 2)
        with pytest.raises(DimensionError):
            layer.forward(np.zeros((4, 5)))


class TestRecurrentStep:
    def test_zero_parameters_fixed_point(self):
        for kind in ("gru", "lstm"):
            cell = make_cell(kind, 4, 3)
            state = cell.initial_state(2)
            x = np.random.default_rng(1).normal(size=(2, 4))
            h, _, _ = cell.step(x, state)
            npt.assert_array_equal(h, np.zeros((2, 3)))

    def test_gru_saturated_update_gate_keeps_state(self):
        rng = np.random.default_rng(2)
        cell = GRUCell(2, 3, rng)
        cell.params["b_update"][:] = 50.0  # z ~ 1 -> h' ~ h
        h0 = rng.normal(size=(1, 3))
        h, _, _ = cell.step(rng.normal(size=(1, 2)), h0)
        npt.assert_allclose(h, h0, atol=1e-12)

    def test_gru_matches_straight_line_oracle(self):
        rng = np.random.default_rng(3)
        cell = GRUCell(2, 3, rng)
        x = rng.normal(size=(5, 2))
        h0 = rng.normal(size=(5, 3))
        got, _, _ = cell.step(x, h0)
        npt.assert_allclose(got, gru_oracle(cell.params, x, h0), atol=1e-12, rtol=0)

    def test_deterministic_bit_identical(self):
        rng = np.random.default_rng(4)
        cell = LSTMCell(3, 4, rng)
        x = rng.normal(size=(2, 3))
        st = cell.initial_state(2)
        a, _, _ = cell.step(x, st)
        b, _, _ = cell.step(x, st)
        npt.assert_array_equal(a, b)

    def test_tanh_bounded_hidden(self):
        rng = np.random.default_rng(5)
        cell = GRUCell(3, 4, rng)
        state = cell.initial_state(8)
        x = 10.0 * rng.normal(size=(8, 3))
        for _ in range(20):
            h, state, _ = cell.step(x, state)
        assert np.all(np.abs(h) <= 1.0)

    def test_non_finite_input_raises(self):
        cell = GRUCell(2, 2, np.random.default_rng(0))
        x = np.array([[np.nan, 0.0]])
        with pytest.raises(NumericError):
            cell.step(x, cell.initial_state(1))

    def test_parameter_counts_match_closed_form(self):
        for i, h in [(2, 3), (15, 32), (7, 5)]:
            gru = GRUCell(i, h, np.random.default_rng(0))
            lstm = LSTMCell(i, h, np.random.default_rng(0))
            assert gru.param_count() == 3 * (i + h + 1) * h
            assert lstm.param_count() == 4 * (i + h + 1) * h


class TestBidirectional:
    def _layer(self, kind, inp, hid, seed):
        rng = np.random.default_rng(seed)
        return BiRecurrent(
            make_cell(kind, inp, hid, rng), make_cell(kind, inp, hid, rng)
        )

    def test_single_step_halves_are_single_cell_steps(self):
        layer = self._layer("gru", 3, 4, 10)
        x = np.random.default_rng(11).normal(size=(2, 1, 3))
        out = layer.forward(x)
        hf, _, _ = layer.cell_fwd.step(x[:, 0, :], layer.cell_fwd.initial_state(2))
        hb, _, _ = layer.cell_bwd.step(x[:, 0, :], layer.cell_bwd.initial_state(2))
        npt.assert_array_equal(out[:, 0, :4], hf)
        npt.assert_array_equal(out[:, 0, 4:], hb)

    def test_palindrome_with_shared_cells_is_own_reversal_swapped(self):
        rng = np.random.default_rng(12)
        cell = GRUCell(2, 3, rng)
        layer = BiRecurrent(cell, cell)  # params_fwd == params_bwd
        half = rng.normal(size=(1, 4, 2))
        x = np.concatenate([half, half[:, ::-1, :]], axis=1)  # palindrome
        out = layer.forward(x)
        swapped = np.concatenate([out[:, ::-1, 3:], out[:, ::-1, :3]], axis=2)
        npt.assert_allclose(out, swapped, atol=1e-12)

    def test_zero_parameters_zero_output(self):
        layer = BiRecurrent(make_cell("lstm", 2, 3), make_cell("lstm", 2, 3))
        out = layer.forward(np.random.default_rng(13).normal(size=(2, 5, 2)))
        npt.assert_array_equal(out, np.zeros((2, 5, 6)))

    def test_output_width_is_twice_hidden(self):
        for hid in (1, 4, 9):
            layer = self._layer("lstm", 3, hid, 14)
            out = layer.forward(np.zeros((2, 6, 3)))
            assert out.shape == (2, 6, 2 * hid)

    def test_empty_sequence_rejected(self):
        layer = self._layer("gru", 2, 2, 15)
        with pytest.raises(PreconditionError):
            layer.forward(np.zeros((1, 0, 2)))
