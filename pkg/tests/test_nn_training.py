"""Backward passes, gradient checking, Adam, and checkpoint round trips."""

import numpy as np
import numpy.testing as npt
import pytest

from optwin.errors import NumericError, StateError
from optwin.nn import (
    Adam,
    Mlp,
    SequenceRegressor,
    clip_global_norm,
    gradient_check,
    load_checkpoint,
    save_checkpoint,
)
from optwin.nn.checkpoint import load_network, save_network


class TestBackward:
    def test_zero_loss_gives_zero_gradients(self):
        model = Mlp([3, 2], out_activation="identity", seed=0)
        x = np.random.default_rng(0).normal(size=(4, 3))
        targets = model.forward(x, train=False)
        _, grads = model.loss_and_gradients(x, targets, "mse")
        for g in grads.values():
            npt.assert_array_equal(g, np.zeros_like(g))

    def test_single_dense_mse_closed_form(self):
        # one sample, one output: dW = 2*(yhat - y)*x, db = 2*(yhat - y)
        model = Mlp([3, 1], out_activation="identity", seed=1)
        x = np.array([[0.3, -1.2, 2.0]])
        y = np.array([[0.7]])
        yhat = model.forward(x, train=False)
        _, grads = model.loss_and_gradients(x, y, "mse")
        resid = 2.0 * (yhat[0, 0] - y[0, 0])
        npt.assert_allclose(grads["dense0.weight"], resid * x, rtol=1e-12)
        npt.assert_allclose(grads["dense0.bias"], [resid], rtol=1e-12)

    def test_backward_without_forward_raises(self):
        model = Mlp([2, 2], seed=2)
        with pytest.raises(StateError):
            model.backward(np.zeros((1, 2)))

    def test_gradients_finite_on_random_models(self):
        rng = np.random.default_rng(3)
        model = SequenceRegressor("lstm", 3, 4, 2, 2, seed=3)
        x = rng.normal(size=(2, 5, 3))
        y = rng.normal(size=(2, 2))
        for kind in ("mse", "huber"):
            _, grads = model.loss_and_gradients(x, y, kind)
            for g in grads.values():
                assert np.isfinite(g).all()


class TestGradientCheck:
    def test_dense_only_model(self):
        rng = np.random.default_rng(10)
        model = Mlp([4, 6, 3], hidden_activation="tanh", seed=10)
        x = rng.normal(size=(5, 4))
        y = rng.normal(size=(5, 3))
        assert gradient_check(model, x, y, h=1e-5) < 1e-6

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_two_layer_gru_forecaster_shape(self, seed):
        rng = np.random.default_rng(seed)
        model = SequenceRegressor("gru", 3, 8, 2, 6, head_index="last", seed=seed)
        x = rng.normal(size=(2, 7, 3))
        y = rng.normal(size=(2, 6))
        err = gradient_check(
            model, x, y, h=1e-5, max_entries_per_array=12, rng=rng
        )
        assert err < 1e-4

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_lstm_surrogate_stack(self, seed):
        rng = np.random.default_rng(100 + seed)
        model = SequenceRegressor("lstm", 2, 6, 2, 1, head_index="center", seed=seed)
        x = rng.normal(size=(2, 9, 2))
        y = rng.normal(size=(2, 1))
        err = gradient_check(
            model, x, y, h=1e-5, max_entries_per_array=12, rng=rng
        )
        assert err < 1e-4

    def test_cross_entropy_loss_gradients(self):
        rng = np.random.default_rng(20)
        model = Mlp([3, 5, 1], seed=20)
        x = rng.normal(size=(6, 3))
        y = rng.integers(0, 2, size=(6, 1)).astype(float)
        assert gradient_check(model, x, y, h=1e-5, loss_kind="cross_entropy") < 1e-5

    def test_h_outside_documented_range_rejected(self):
        model = Mlp([2, 1], seed=0)
        from optwin.errors import PreconditionError

        with pytest.raises(PreconditionError):
            gradient_check(model, np.zeros((1, 2)), np.zeros((1, 1)), h=1e-2)


class TestAdam:
    def test_zero_gradient_leaves_parameters(self):
        p = {"w": np.array([1.0, -2.0])}
        opt = Adam(p, learning_rate=0.1)
        opt.update(p, {"w": np.zeros(2)})
        npt.assert_array_equal(p["w"], [1.0, -2.0])

    def test_first_step_closed_form(self):
        # g=1, lr=0.1: mhat=1, vhat=1 -> delta = lr/(1+eps) ~ lr
        p = {"w": np.array([0.0])}
        opt = Adam(p, learning_rate=0.1)
        opt.update(p, {"w": np.array([1.0])})
        npt.assert_allclose(p["w"], [-0.1], atol=1e-8)
        assert opt.step == 1

    def test_constant_gradient_monotone_motion(self):
        p = {"w": np.array([0.5])}
        opt = Adam(p, learning_rate=0.01)
        history = [p["w"][0]]
        for _ in range(50):
            opt.update(p, {"w": np.array([2.5])})
            history.append(p["w"][0])
        diffs = np.diff(history)
        assert np.all(diffs < 0.0)  # motion opposite to sign(g) at every step

    def test_convex_objective_reduced_99_percent(self):
        # min ||p||^2 from a random start; 200 steps
        rng = np.random.default_rng(42)
        p = {"w": rng.uniform(0.5, 1.5, size=16) * rng.choice([-1, 1], size=16)}
        start = float(np.sum(p["w"] ** 2))
        opt = Adam(p, learning_rate=0.05)
        for _ in range(200):
            grads = {"w": 2.0 * p["w"]}
            clip_global_norm(grads)
            opt.update(p, grads)
        assert float(np.sum(p["w"] ** 2)) < 0.01 * start

    def test_non_finite_gradient_raises(self):
        p = {"w": np.zeros(2)}
        opt = Adam(p)
        with pytest.raises(NumericError):
            opt.update(p, {"w": np.array([np.inf, 0.0])})

    def test_clip_global_norm(self):
        g = {"a": np.array([3.0, 4.0]), "b": np.array([12.0])}
        norm = clip_global_norm(g, max_norm=5.0)
        npt.assert_allclose(norm, 13.0)
        total = np.sqrt(sum(np.sum(v * v) for v in g.values()))
        npt.assert_allclose(total, 5.0)


class TestCheckpoint:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(7)
        arrays = {
            "w": rng.normal(size=(3, 4)),
            "b": rng.normal(size=5),
        }
        path = tmp_path / "model.npz"
        save_checkpoint(path, "unit-test", arrays, {"note": "x", "val": 0.1})
        kind, loaded, meta = load_checkpoint(path)
        assert kind == "unit-test"
        assert meta == {"note": "x", "val": 0.1}
        for k in arrays:
            npt.assert_array_equal(loaded[k], arrays[k])

    def test_network_round_trip(self, tmp_path):
        model = SequenceRegressor("gru", 3, 4, 1, 2, seed=9)
        path = tmp_path / "net.npz"
        save_network(path, "seqreg", model, {"extra": 1})
        loaded, meta = load_network(path, "seqreg", SequenceRegressor)
        assert meta["extra"] == 1
        x = np.random.default_rng(1).normal(size=(2, 5, 3))
        npt.assert_array_equal(
            model.forward(x, train=False), loaded.forward(x, train=False)
        )

    def test_kind_mismatch_rejected(self, tmp_path):
        path = tmp_path / "m.npz"
        save_checkpoint(path, "alpha", {"w": np.zeros(1)})
        from optwin.errors import SchemaError

        with pytest.raises(SchemaError):
            load_checkpoint(path, expect_kind="beta")
