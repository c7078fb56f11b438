"""Sliding-window datasets, class balancing, and augmentation.

Windows stride 1. Inputs are z-score normalized per feature; the
statistics come from the training call and are reused verbatim for
evaluation data (never recomputed). Features with (near-)zero spread
get std 1 so normalization stays defined.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from optwin.errors import BalanceError, PreconditionError
from optwin.telemetry.records import group_by_device

JITTER_SIGMA = 0.01  # normalized units, for oversampling and augmentation


@dataclass
class WindowedDataset:
    inputs: np.ndarray  # (N, W, 15), normalized
    targets_seq: Optional[np.ndarray]  # (N, H, 15), normalized forecasting targets
    labels: np.ndarray  # (N,) bool prognosis labels
    mean: np.ndarray  # (15,)
    std: np.ndarray  # (15,)
    device: np.ndarray  # (N,) pseudonymized device id per window
    end_timestamp: np.ndarray  # (N,) seconds of each window's last input sample

    def __len__(self):
        return self.inputs.shape[0]

    def denormalize(self, values):
        return values * self.std + self.mean

    def normalize(self, values):
        return (values - self.mean) / self.std

    def subset(self, idx):
        return replace(
            self,
            inputs=self.inputs[idx],
            targets_seq=None if self.targets_seq is None else self.targets_seq[idx],
            labels=self.labels[idx],
            device=self.device[idx],
            end_timestamp=self.end_timestamp[idx],
        )


def compute_normalization(records):
    """Per-feature mean/std over all samples of the given records."""
    series = np.stack([r.features for r in records])
    if np.isnan(series).any():
        raise PreconditionError("normalization source contains missing values; fuse first")
    mean = series.mean(axis=0)
    std = series.std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    return mean, std


def make_windows(records, window, horizon, normalization=None, stride=1, with_targets=True):
    """Sliding windows with forecasting targets and prognosis labels.

    A window's label is taken from its last input sample's
    fault_within_horizon flag (fault within ``horizon`` of the window
    end). ``normalization``: None computes stats from these records
    (training call); pass (mean, std) for evaluation data. ``stride``
    subsamples window start positions (default 1 keeps every window);
    ``with_targets=False`` skips target materialization for
    inference-only datasets.
    """
    grouped = group_by_device(records)
    for dev, recs in grouped.items():
        if len(recs) < window + horizon:
            raise PreconditionError(
                f"device {dev} has {len(recs)} samples; needs >= W+H = {window + horizon}"
            )
    if normalization is None:
        mean, std = compute_normalization(records)
    else:
        mean, std = normalization
    inputs, targets, labels, devices, ends = [], [], [], [], []
    for dev, recs in grouped.items():
        series = np.stack([r.features for r in recs])
        if np.isnan(series).any():
            raise PreconditionError("windows built on unfused records with missing values")
        normed = (series - mean) / std
        n = series.shape[0]
        for i in range(0, n - window - horizon + 1, stride):
            end = i + window - 1
            inputs.append(normed[i : i + window])
            if with_targets:
                targets.append(normed[i + window : i + window + horizon])
            labels.append(bool(recs[end].fault_within_horizon))
            devices.append(dev)
            ends.append(recs[end].timestamp)
    return WindowedDataset(
        inputs=np.stack(inputs),
        targets_seq=np.stack(targets) if with_targets else None,
        labels=np.array(labels, dtype=bool),
        mean=mean,
        std=std,
        device=np.array(devices),
        end_timestamp=np.array(ends),
    )


def balance(dataset, strategy, seed=0):
    """Equalize the class counts; oversampled duplicates carry jitter."""
    labels = dataset.labels
    pos = np.flatnonzero(labels)
    neg = np.flatnonzero(~labels)
    if pos.size == 0 or neg.size == 0:
        raise BalanceError("both classes must be present to balance")
    rng = np.random.default_rng(seed)
    minority, majority = (pos, neg) if pos.size < neg.size else (neg, pos)
    if strategy == "undersample":
        keep = np.sort(rng.choice(majority, size=minority.size, replace=False))
        idx = np.sort(np.concatenate([minority, keep]))
        return dataset.subset(idx)
    if strategy == "oversample":
        extra = rng.choice(minority, size=majority.size - minority.size, replace=True)
        base = dataset.subset(np.sort(np.concatenate([minority, majority])))
        dup = dataset.subset(extra)
        dup.inputs = dup.inputs + rng.normal(0.0, JITTER_SIGMA, size=dup.inputs.shape)
        return replace(
            base,
            inputs=np.concatenate([base.inputs, dup.inputs]),
            targets_seq=None
            if base.targets_seq is None
            else np.concatenate([base.targets_seq, dup.targets_seq]),
            labels=np.concatenate([base.labels, dup.labels]),
            device=np.concatenate([base.device, dup.device]),
            end_timestamp=np.concatenate([base.end_timestamp, dup.end_timestamp]),
        )
    raise ValueError(f"unknown balance strategy {strategy!r}")


def augment(dataset, ops=("amplitude-jitter", "time-shift"), seed=0, factor=2):
    """Multiply the dataset by ``factor``; originals are kept verbatim.

    amplitude-jitter adds Gaussian noise (sigma 0.01 normalized units);
    time-shift rolls the input window circularly. Labels and forecasting
    targets are preserved unchanged.
    """
    if factor < 1:
        raise ValueError("factor must be >= 1")
    for op in ops:
        if op not in ("amplitude-jitter", "time-shift"):
            raise ValueError(f"unknown augmentation op {op!r}")
    if factor == 1:
        return dataset
    rng = np.random.default_rng(seed)
    parts = [dataset.inputs]
    meta_repeats = [None] * (factor - 1)
    for _ in range(factor - 1):
        copy = dataset.inputs.copy()
        if "time-shift" in ops:
            shifts = rng.integers(1, dataset.inputs.shape[1], size=len(dataset))
            for i, s in enumerate(shifts):
                copy[i] = np.roll(copy[i], int(s), axis=0)
        if "amplitude-jitter" in ops:
            copy = copy + rng.normal(0.0, JITTER_SIGMA, size=copy.shape)
        parts.append(copy)
    reps = factor
    return replace(
        dataset,
        inputs=np.concatenate(parts),
        targets_seq=None
        if dataset.targets_seq is None
        else np.tile(dataset.targets_seq, (reps, 1, 1)),
        labels=np.tile(dataset.labels, reps),
        device=np.tile(dataset.device, reps),
        end_timestamp=np.tile(dataset.end_timestamp, reps),
    )


def split_records_by_day(records, train_days, samples_per_day=None):
    """(train, eval) record split at a day boundary by timestamp."""
    cutoff = train_days * 86400.0
    train = [r for r in records if r.timestamp < cutoff]
    evaluation = [r for r in records if r.timestamp >= cutoff]
    return train, evaluation
