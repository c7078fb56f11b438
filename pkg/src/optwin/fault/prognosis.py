"""Prognosis on predicted state trajectories.

An alarm is raised when any bounded feature's predicted trajectory
crosses its alarm bound within the forecast horizon. The probability is
a calibrated monotone score of crossing extent: 0 with no predicted
crossing, at least 0.5 as soon as one step crosses, approaching 1 as
more of the horizon sits beyond the bound. alarm == (probability >=
threshold) by construction at the default threshold.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from optwin.telemetry.catalog import CATALOG

DEFAULT_PROBABILITY_THRESHOLD = 0.5


@dataclass
class PrognosisReport:
    probability: float
    alarm: bool
    lead_time_steps: Optional[int]  # steps until the first predicted crossing
    threshold: float


def prognose(predicted, bounds, threshold=DEFAULT_PROBABILITY_THRESHOLD, catalog=CATALOG):
    """Score one (H, 15) denormalized predicted trajectory.

    ``bounds`` maps feature name -> (low, high) alarm bounds; unbounded
    features use +-inf.
    """
    predicted = np.asarray(predicted, dtype=np.float64)
    crossed = np.zeros(predicted.shape[0], dtype=bool)
    for name, (low, high) in bounds.items():
        j = catalog.index(name)
        crossed |= (predicted[:, j] > high) | (predicted[:, j] < low)
    if crossed.any():
        severity = float(crossed.mean())
        probability = 0.5 + 0.5 * severity
        lead = int(np.argmax(crossed)) + 1  # 1-based step of first crossing
    else:
        probability = 0.0
        lead = None
    alarm = probability >= threshold
    return PrognosisReport(
        probability=probability,
        alarm=alarm,
        lead_time_steps=lead if alarm else None,
        threshold=threshold,
    )


@dataclass
class PrognosisEvaluation:
    accuracy: float
    false_positive_rate: float  # FP / (FP + TN), per-sample
    false_alarm_fraction: float  # FP / all alarms
    per_event_recall: float  # alarmed fault devices / fault devices
    lead_steps: dict  # device -> steps between first alarm and onset
    early_alarm_fraction: float  # devices alarmed >= required lead
    scored_windows: int
    alarms: "np.ndarray" = field(repr=False, default=None)


def evaluate_prognosis(
    model,
    dataset,
    bounds,
    onsets_seconds,
    step_seconds,
    required_lead_steps=96,
    batch=256,
):
    """Per-sample prognosis scoring over a windowed dataset.

    Fault devices are scored only on windows that end before their onset
    (after onset the device is failed, not "about to fail"). The
    false-positive rate is FP/(FP+TN) over scored windows; the
    false-alarm fraction FP/(FP+TP) is reported alongside.
    """
    n = len(dataset)
    alarms = np.zeros(n, dtype=bool)
    for i in range(0, n, batch):
        pred = model.forecast_batch(dataset.inputs[i : i + batch])
        for k in range(pred.shape[0]):
            denorm = model.denormalize(pred[k])
            alarms[i + k] = prognose(denorm, bounds).alarm

    onset_by_dev = dict(onsets_seconds)
    scored = np.ones(n, dtype=bool)
    for i in range(n):
        onset = onset_by_dev.get(dataset.device[i])
        if onset is not None and dataset.end_timestamp[i] >= onset:
            scored[i] = False

    labels = dataset.labels[scored]
    got = alarms[scored]
    tp = int(np.sum(got & labels))
    tn = int(np.sum(~got & ~labels))
    fp = int(np.sum(got & ~labels))
    fn = int(np.sum(~got & labels))
    total = tp + tn + fp + fn
    accuracy = (tp + tn) / total if total else 0.0
    fpr = fp / (fp + tn) if (fp + tn) else 0.0
    faf = fp / (fp + tp) if (fp + tp) else 0.0

    lead_steps = {}
    devices_in_play = set()
    for dev, onset in onset_by_dev.items():
        mask = dataset.device == dev
        if not mask.any():
            continue
        ends = dataset.end_timestamp[mask]
        if ends.min() >= onset:
            continue  # onset precedes every scored window
        devices_in_play.add(dev)
        dev_alarms = alarms[mask] & (ends < onset)
        if dev_alarms.any():
            first = ends[dev_alarms].min()
            lead_steps[dev] = int(round((onset - first) / step_seconds))
    recall = len(lead_steps) / len(devices_in_play) if devices_in_play else 1.0
    early = (
        sum(1 for v in lead_steps.values() if v >= required_lead_steps)
        / len(devices_in_play)
        if devices_in_play
        else 1.0
    )
    return PrognosisEvaluation(
        accuracy=accuracy,
        false_positive_rate=fpr,
        false_alarm_fraction=faf,
        per_event_recall=recall,
        lead_steps=lead_steps,
        early_alarm_fraction=early,
        scored_windows=total,
        alarms=alarms,
    )
