"""End-to-end fault-model data preparation.

Shared by the CLI, the closed-loop runtime, and the acceptance suite so
they all build identical datasets from a scenario.
"""

from dataclasses import dataclass

import numpy as np

from optwin.telemetry import (
    alarm_bounds,
    fuse,
    generate_fleet,
    make_windows,
)
from optwin.telemetry.records import group_by_device
from optwin.telemetry.scenario import fault_onset_seconds


@dataclass
class PrognosisData:
    train: "WindowedDataset"
    evaluation: "WindowedDataset"
    bounds: dict
    onsets: dict  # pseudonymized device id -> onset seconds
    step_seconds: float


def prepare_prognosis_data(scenario, window, horizon, train_stride=16):
    """Fuse a generated fleet and window it for forecaster training.

    Training windows end inside the training span (stride-subsampled to
    keep the dataset tractable). Evaluation windows end inside the
    evaluation span but may reach back into the training span for their
    input history (a deployed forecaster has full history); both use
    training-split normalization statistics.
    """
    result = fuse(generate_fleet(scenario))
    records = result.records
    cutoff = scenario.train_days * 86400.0
    step_s = scenario.step_seconds()

    train_records = [r for r in records if r.timestamp < cutoff]
    train_ds = make_windows(train_records, window, horizon, stride=train_stride)

    # evaluation windows: slice starts W-1 steps before the cutoff so the
    # first eval-span window end is covered; no targets needed
    hist_start = cutoff - (window - 1) * step_s
    eval_records = [r for r in records if r.timestamp >= hist_start]
    eval_ds = make_windows(
        eval_records,
        window,
        horizon,
        normalization=(train_ds.mean, train_ds.std),
        with_targets=False,
    )
    keep = eval_ds.end_timestamp >= cutoff
    eval_ds = eval_ds.subset(np.flatnonzero(keep))

    onsets = {
        result.pseudonyms[dev]: t for dev, t in fault_onset_seconds(scenario).items()
    }
    return PrognosisData(train_ds, eval_ds, alarm_bounds(scenario), onsets, step_s)


def diagnosis_dataset(scenario_or_records, seed=0, max_per_class=1500):
    """Balanced (features, labels) arrays for diagnosis training.

    Labels are the records' fault_within_horizon flags; the majority class
    is undersampled to the minority count (capped at max_per_class each).
    """
    if isinstance(scenario_or_records, list):
        records = scenario_or_records
    else:
        records = fuse(generate_fleet(scenario_or_records)).records
    grouped = group_by_device(records)
    feats, labels = [], []
    for recs in grouped.values():
        for r in recs:
            feats.append(r.features)
            labels.append(bool(r.fault_within_horizon))
    x = np.stack(feats)
    y = np.array(labels, dtype=bool)
    rng = np.random.default_rng(seed)
    pos = np.flatnonzero(y)
    neg = np.flatnonzero(~y)
    n = min(pos.size, neg.size, max_per_class)
    pos = np.sort(rng.choice(pos, size=n, replace=False))
    neg = np.sort(rng.choice(neg, size=n, replace=False))
    idx = np.sort(np.concatenate([pos, neg]))
    return x[idx], y[idx]
