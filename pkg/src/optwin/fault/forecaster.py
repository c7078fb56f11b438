"""Recurrent equipment-state forecaster.

A bidirectional GRU stack reads a normalized window of W samples and the
dense head emits the next H steps of all 15 features jointly (H*15
outputs). Training is plain minibatch Adam with global-norm clipping,
deterministic per seed.
"""

from dataclasses import asdict, dataclass

import numpy as np

from optwin.errors import DimensionError, TrainingError
from optwin.nn import Adam, SequenceRegressor, clip_global_norm
from optwin.nn.checkpoint import load_checkpoint, save_checkpoint

N_FEATURES = 15
CHECKPOINT_KIND = "state-forecaster"


@dataclass(frozen=True)
class ForecastConfig:
    window: int = 192
    horizon: int = 96
    hidden_size: int = 32
    num_layers: int = 2
    epochs: int = 8
    batch_size: int = 64
    learning_rate: float = 2e-3
    train_stride: int = 1  # extra subsampling on top of the dataset's own stride
    holdout_fraction: float = 0.15


class ForecasterModel:
    def __init__(self, net, config, mean, std):
        self.net = net
        self.config = config
        self.mean = np.asarray(mean, dtype=np.float64)
        self.std = np.asarray(std, dtype=np.float64)

    def forecast(self, window):
        """(W, 15) normalized window -> (H, 15) normalized predictions."""
        return self.forecast_batch(window[None, ...])[0]

    def forecast_batch(self, windows):
        windows = np.asarray(windows, dtype=np.float64)
        if windows.ndim != 3 or windows.shape[1:] != (
            self.config.window,
            N_FEATURES,
        ):
            raise DimensionError(
                f"expected (batch, {self.config.window}, {N_FEATURES}), got {windows.shape}"
            )
        out = self.net.forward(windows, train=False)
        return out.reshape(-1, self.config.horizon, N_FEATURES)

    def denormalize(self, values):
        return values * self.std + self.mean

    def normalize(self, values):
        return (values - self.mean) / self.std

    def save(self, path):
        arrays = dict(self.net.parameters())
        arrays["__mean__"] = self.mean
        arrays["__std__"] = self.std
        save_checkpoint(
            path,
            CHECKPOINT_KIND,
            arrays,
            {"config": asdict(self.config), "network_config": self.net.config()},
        )

    @classmethod
    def load(cls, path):
        _, arrays, meta = load_checkpoint(path, expect_kind=CHECKPOINT_KIND)
        net = SequenceRegressor.from_config(meta["network_config"])
        params = net.parameters()
        for name, arr in arrays.items():
            if name.startswith("__"):
                continue
            params[name][...] = arr
        cfg = ForecastConfig(**meta["config"])
        return cls(net, cfg, arrays["__mean__"], arrays["__std__"])


def persistence_mse(dataset):
    """Baseline: hold the window's last observed value for all H steps."""
    last = dataset.inputs[:, -1:, :]
    err = dataset.targets_seq - last
    return float(np.mean(err * err))


@dataclass
class ForecastTrainReport:
    epoch_loss: list
    holdout_mse: float
    persistence_mse: float


def train_forecaster(train_ds, config=ForecastConfig(), seed=0):
    """Fit the forecaster; returns (model, report).

    Windows are subsampled by ``train_stride`` then split into fit and
    holdout parts; the holdout slice backs the reported mse.
    """
    if train_ds.targets_seq is None:
        raise DimensionError("training dataset lacks forecasting targets")
    rng = np.random.default_rng(seed)
    idx = np.arange(0, len(train_ds), config.train_stride)
    rng.shuffle(idx)
    n_hold = max(1, int(len(idx) * config.holdout_fraction))
    hold_idx, fit_idx = idx[:n_hold], idx[n_hold:]
    x_fit = train_ds.inputs[fit_idx]
    y_fit = train_ds.targets_seq[fit_idx].reshape(fit_idx.size, -1)
    x_hold = train_ds.inputs[hold_idx]
    y_hold = train_ds.targets_seq[hold_idx].reshape(hold_idx.size, -1)

    net = SequenceRegressor(
        "gru",
        N_FEATURES,
        config.hidden_size,
        config.num_layers,
        config.horizon * N_FEATURES,
        head_index="last",
        rng=rng,
    )
    opt = Adam(net.parameters(), learning_rate=config.learning_rate)
    epoch_loss = []
    order = np.arange(fit_idx.size)
    for _ in range(config.epochs):
        rng.shuffle(order)
        losses = []
        for start in range(0, order.size, config.batch_size):
            rows = order[start : start + config.batch_size]
            loss, grads = net.loss_and_gradients(x_fit[rows], y_fit[rows], "mse")
            if not np.isfinite(loss):
                raise TrainingError("forecaster training diverged (non-finite loss)")
            clip_global_norm(grads)
            opt.update(net.parameters(), grads)
            losses.append(loss)
        epoch_loss.append(float(np.mean(losses)))

    model = ForecasterModel(net, config, train_ds.mean, train_ds.std)
    pred = _batched_forward(net, x_hold)
    hold_mse = float(np.mean((pred - y_hold) ** 2))
    base = float(
        np.mean((train_ds.targets_seq[hold_idx] - x_hold[:, -1:, :]) ** 2)
    )
    return model, ForecastTrainReport(epoch_loss, hold_mse, base)


def _batched_forward(net, x, batch=256):
    outs = [
        net.forward(x[i : i + batch], train=False) for i in range(0, x.shape[0], batch)
    ]
    return np.concatenate(outs, axis=0)


def forecast(model, window):
    return model.forecast(window)
