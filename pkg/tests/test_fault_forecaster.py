"""Forecaster training contracts and prognosis scoring semantics."""

import math

import numpy as np
import numpy.testing as npt
import pytest

from optwin.errors import DimensionError
from optwin.fault import (
    ForecastConfig,
    ForecasterModel,
    PrognosisReport,
    persistence_mse,
    prognose,
    train_forecaster,
)
from optwin.nn import SequenceRegressor
from optwin.telemetry import CATALOG
from optwin.telemetry.windows import WindowedDataset


def dataset_from_series(series_per_device, window, horizon):
    """Build a WindowedDataset directly from raw per-device (n, 15) series."""
    inputs, targets, devs, ends = [], [], [], []
    flat = np.concatenate(series_per_device)
    mean = flat.mean(axis=0)
    std = np.where(flat.std(axis=0) < 1e-12, 1.0, flat.std(axis=0))
    for d, series in enumerate(series_per_device):
        normed = (series - mean) / std
        n = series.shape[0]
        for i in range(n - window - horizon + 1):
            inputs.append(normed[i : i + window])
            targets.append(normed[i + window : i + window + horizon])
            devs.append(f"dev-{d:010x}")
            ends.append(float(i + window - 1))
    return WindowedDataset(
        inputs=np.stack(inputs),
        targets_seq=np.stack(targets),
        labels=np.zeros(len(inputs), dtype=bool),
        mean=mean,
        std=std,
        device=np.array(devs),
        end_timestamp=np.array(ends),
    )


SMALL = ForecastConfig(
    window=16,
    horizon=4,
    hidden_size=6,
    num_layers=1,
    epochs=30,
    batch_size=16,
    learning_rate=5e-3,
    train_stride=1,
)


class TestTrainForecaster:
    def test_constant_series_learned_to_tiny_mse(self):
        series = [np.tile(CATALOG.nominals(), (60, 1)) for _ in range(2)]
        ds = dataset_from_series(series, SMALL.window, SMALL.horizon)
        model, report = train_forecaster(ds, SMALL, seed=0)
        assert report.holdout_mse <= 1e-6

    def test_beats_persistence_on_structured_series(self):
        # strong sinusoid: persistence is poor, the recurrent net is not
        rng = np.random.default_rng(0)
        series = []
        for d in range(3):
            t = np.arange(240)
            base = CATALOG.nominals()[None, :]
            season = np.sin(2 * np.pi * t / 24.0 + d)[:, None] * 2.0
            series.append(base + season + 0.05 * rng.normal(size=(240, 15)))
        ds = dataset_from_series(series, 24, 6)
        cfg = ForecastConfig(
            window=24, horizon=6, hidden_size=8, num_layers=1,
            epochs=25, batch_size=32, learning_rate=5e-3, train_stride=2,
        )
        model, report = train_forecaster(ds, cfg, seed=1)
        assert report.holdout_mse < 0.5 * report.persistence_mse

    def test_same_seed_identical_models(self):
        rng = np.random.default_rng(2)
        series = [rng.normal(size=(50, 15)) for _ in range(2)]
        ds = dataset_from_series(series, SMALL.window, SMALL.horizon)
        cfg = ForecastConfig(
            window=16, horizon=4, hidden_size=5, num_layers=1, epochs=3,
            batch_size=8, train_stride=1,
        )
        m1, _ = train_forecaster(ds, cfg, seed=9)
        m2, _ = train_forecaster(ds, cfg, seed=9)
        for a, b in zip(m1.net.parameters().values(), m2.net.parameters().values()):
            npt.assert_array_equal(a, b)

    def test_checkpoint_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        series = [rng.normal(size=(40, 15))]
        ds = dataset_from_series(series, SMALL.window, SMALL.horizon)
        cfg = ForecastConfig(
            window=16, horizon=4, hidden_size=4, num_layers=1, epochs=1,
            batch_size=8, train_stride=1,
        )
        model, _ = train_forecaster(ds, cfg, seed=4)
        path = tmp_path / "forecaster.npz"
        model.save(path)
        loaded = ForecasterModel.load(path)
        x = ds.inputs[:3]
        npt.assert_array_equal(model.forecast_batch(x), loaded.forecast_batch(x))
        npt.assert_array_equal(model.mean, loaded.mean)


class TestForecast:
    def test_zero_parameter_model_emits_bias(self):
        net = SequenceRegressor("gru", 15, 4, 1, 4 * 15, head_index="last")
        net.head.params["bias"][:] = 0.25
        model = ForecasterModel(
            net, ForecastConfig(window=8, horizon=4), np.zeros(15), np.ones(15)
        )
        pred = model.forecast(np.zeros((8, 15)))
        npt.assert_allclose(pred, 0.25)

    def test_wrong_window_shape_rejected(self):
        net = SequenceRegressor("gru", 15, 4, 1, 4 * 15, head_index="last")
        model = ForecasterModel(
            net, ForecastConfig(window=8, horizon=4), np.zeros(15), np.ones(15)
        )
        with pytest.raises(DimensionError):
            model.forecast(np.zeros((9, 15)))

    def test_ramp_slope_sign_preserved(self):
        # training on rising ramps: predictions for a rising window rise too
        rng = np.random.default_rng(5)
        series = []
        for d in range(3):
            t = np.arange(200)[:, None]
            base = CATALOG.nominals()[None, :] + 0.05 * t
            series.append(base + 0.02 * rng.normal(size=(200, 15)))
        ds = dataset_from_series(series, 20, 6)
        cfg = ForecastConfig(
            window=20, horizon=6, hidden_size=8, num_layers=1, epochs=20,
            batch_size=32, learning_rate=5e-3, train_stride=2,
        )
        model, _ = train_forecaster(ds, cfg, seed=6)
        pred = model.forecast(ds.inputs[10])
        window_end = ds.inputs[10][-1]
        assert np.mean(pred[-1] - window_end) > 0.0


class TestPrognose:
    def _bounds(self, hi=60.0):
        bounds = {name: (-math.inf, math.inf) for name in CATALOG.names}
        bounds["laser bias current"] = (-math.inf, hi)
        return bounds

    def test_nominal_prediction_no_alarm(self):
        pred = np.tile(CATALOG.nominals(), (96, 1))
        rep = prognose(pred, self._bounds())
        assert rep.probability == 0.0 and not rep.alarm
        assert rep.lead_time_steps is None

    def test_crossing_at_step_96_lead_96(self):
        pred = np.tile(CATALOG.nominals(), (96, 1))
        j = CATALOG.index("laser bias current")
        pred[95, j] = 75.0  # crosses at the final step
        rep = prognose(pred, self._bounds())
        assert rep.alarm and rep.lead_time_steps == 96

    def test_infinite_threshold_never_alarms(self):
        pred = np.tile(CATALOG.nominals(), (96, 1)) + 1e6
        bounds = {name: (-math.inf, math.inf) for name in CATALOG.names}
        rep = prognose(pred, bounds)
        assert not rep.alarm and rep.probability == 0.0

    def test_alarm_iff_probability_at_threshold(self):
        pred = np.tile(CATALOG.nominals(), (96, 1))
        j = CATALOG.index("laser bias current")
        pred[40:, j] = 80.0
        rep = prognose(pred, self._bounds(), threshold=0.5)
        assert rep.alarm == (rep.probability >= rep.threshold)
        strict = prognose(pred, self._bounds(), threshold=0.99)
        assert strict.alarm == (strict.probability >= 0.99)
