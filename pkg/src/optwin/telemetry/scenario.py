"""Degradation scenarios: the synthetic stand-in for sensing detectors.

Per device, each feature is nominal + daily seasonal component + Gaussian
noise. Fault devices additionally get a monotone ramp on the causally
linked features starting ``drift_lead_days`` before onset. The ramp slope
is amount / (lead_steps - samples_per_day/2), which makes the drift's
mean over the last pre-onset day equal the configured amount exactly; the
ramp continues past onset and saturates at twice the amount.

Alarm bounds (see ``alarm_bounds``) sit at the drift level reached
``cross_margin_steps`` before onset. A forecaster that tracks the ramp
therefore alarms about label_horizon + cross_margin steps before onset.

fault_within_horizon labels a sample True iff the device's onset lies
within ``label_horizon_steps`` after it (and strictly after it): the label
depends only on the onset time relative to the sample, never on later
samples.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from optwin.telemetry.catalog import CATALOG
from optwin.telemetry.records import TelemetryRecord

SECONDS_PER_DAY = 86400.0

DEFAULT_NOISE_SIGMA = {
    "laser bias current": 1.2,
    "environment temperature": 0.8,
    "output optical power": 0.25,
    "input optical power": 0.35,
    "laser temperature offset": 0.4,
    "module supply voltage": 0.02,
    "TEC current": 6.0,
    "chassis fan speed": 150.0,
    "received OSNR": 0.6,
    "pre-FEC BER": 0.3,
    "CD estimate": 15.0,
    "uptime": 1.0,
    "board humidity": 1.5,
    "transceiver case temperature": 0.9,
    "backplane error count": 0.8,
}

DEFAULT_SEASONAL_AMPLITUDE = {
    "laser bias current": 1.6,
    "environment temperature": 2.0,
    "output optical power": 0.35,
    "input optical power": 0.5,
    "laser temperature offset": 0.55,
    "module supply voltage": 0.028,
    "TEC current": 9.0,
    "chassis fan speed": 220.0,
    "received OSNR": 0.9,
    "pre-FEC BER": 0.45,
    "CD estimate": 20.0,
    "uptime": 0.0,
    "board humidity": 2.2,
    "transceiver case temperature": 1.4,
    "backplane error count": 0.5,
}


@dataclass(frozen=True)
class DriftSpec:
    kind: str = "ramp"  # ramp | step | none
    amount: float = 0.0  # signed feature units reached at onset


@dataclass
class DegradationScenario:
    devices: int = 20
    days: int = 43
    samples_per_day: int = 96
    train_days: int = 36
    fault_onset_day: dict = field(default_factory=dict)  # device index -> day
    drift: dict = field(default_factory=dict)  # feature name -> DriftSpec
    noise_sigma: dict = field(default_factory=lambda: dict(DEFAULT_NOISE_SIGMA))
    seasonal_amplitude: dict = field(
        default_factory=lambda: dict(DEFAULT_SEASONAL_AMPLITUDE)
    )
    missing_rate: float = 0.02
    label_horizon_steps: int = 96
    drift_lead_days: float = 3.0
    cross_margin_steps: int = 48
    seed: int = 0

    def __post_init__(self):
        for dev, day in self.fault_onset_day.items():
            if not (0 < day < self.days):
                raise ValueError(f"onset day {day} outside scenario for device {dev}")
        for name in list(self.drift) + list(self.noise_sigma):
            if name not in CATALOG.names:
                raise ValueError(f"unknown feature {name!r}")

    @property
    def total_steps(self):
        return self.days * self.samples_per_day

    @property
    def lead_steps(self):
        return int(round(self.drift_lead_days * self.samples_per_day))

    def step_seconds(self):
        return SECONDS_PER_DAY / self.samples_per_day

    def onset_step(self, device):
        return int(round(self.fault_onset_day[device] * self.samples_per_day))


def default_prognosis_scenario(seed=0):
    """20 devices over 36+7 days; drifts on bias current and temperature.

    Three onsets inside the training span give the forecaster ramp
    examples; five onsets in the evaluation week are what prognosis is
    scored on.
    """
    return DegradationScenario(
        fault_onset_day={
            2: 12.0,
            5: 22.0,
            8: 31.0,
            10: 38.2,
            12: 39.1,
            14: 40.3,
            16: 41.2,
            18: 42.0,
        },
        drift={
            "laser bias current": DriftSpec("ramp", 12.0),
            "environment temperature": DriftSpec("ramp", 8.0),
        },
        seed=seed,
    )


def diagnosis_scenario(seed=0):
    """Graded drifts across the five fault-relevant features.

    Magnitudes are calibrated so split-count importance recovers the
    documented cause ordering; this is a calibration target, not an
    independent discovery.
    """
    return DegradationScenario(
        devices=24,
        fault_onset_day={d: 10.0 + 2.1 * i for i, d in enumerate(range(1, 24, 2))},
        drift={
            "laser bias current": DriftSpec("ramp", 7.2),
            "environment temperature": DriftSpec("ramp", 3.6),
            "output optical power": DriftSpec("ramp", -0.85),
            "input optical power": DriftSpec("ramp", -0.95),
            "laser temperature offset": DriftSpec("ramp", 0.85),
        },
        seed=seed,
    )


def _ramp_slope(spec, lead_steps, samples_per_day):
    # mean over the last pre-onset day equals `amount` with this slope
    return spec.amount / (lead_steps - samples_per_day / 2.0)


def _drift_offsets(spec, n, onset_step, lead_steps, samples_per_day):
    """Signed offset series (length n) of one drifted feature."""
    offs = np.zeros(n)
    if spec.kind == "none" or spec.amount == 0.0:
        return offs
    start = onset_step - lead_steps
    k = np.arange(n)
    if spec.kind == "step":
        offs[k >= start] = spec.amount
        return offs
    slope = _ramp_slope(spec, lead_steps, samples_per_day)
    ramp = slope * (k - start)
    lo, hi = (2.0 * spec.amount, 0.0) if spec.amount < 0 else (0.0, 2.0 * spec.amount)
    return np.clip(ramp, lo, hi)


def generate_fleet(scenario):
    """Generate the full fleet's records, deterministic per seed."""
    ss = np.random.SeedSequence(scenario.seed)
    children = ss.spawn(scenario.devices)
    step_s = scenario.step_seconds()
    n = scenario.total_steps
    names = CATALOG.names
    nominal = CATALOG.nominals()
    sigma = np.array([scenario.noise_sigma.get(f, 0.0) for f in names])
    seasonal = np.array([scenario.seasonal_amplitude.get(f, 0.0) for f in names])
    drift_specs = [scenario.drift.get(f) for f in names]
    lead = scenario.lead_steps
    records = []
    for dev in range(scenario.devices):
        rng = np.random.default_rng(children[dev])
        phase = rng.uniform(0.0, 2.0 * np.pi, size=15)
        noise = rng.normal(0.0, 1.0, size=(n, 15)) * sigma
        day_frac = (np.arange(n) % scenario.samples_per_day) / scenario.samples_per_day
        season = seasonal * np.sin(2.0 * np.pi * day_frac[:, None] + phase)
        values = nominal + season + noise
        onset = scenario.onset_step(dev) if dev in scenario.fault_onset_day else None
        if onset is not None:
            for j, spec in enumerate(drift_specs):
                if spec is None:
                    continue
                values[:, j] += _drift_offsets(
                    spec, n, onset, lead, scenario.samples_per_day
                )
        if scenario.missing_rate > 0.0:
            mask = rng.random(size=(n, 15)) < scenario.missing_rate
            values[mask] = np.nan
        dev_id = f"otn-node-{dev:03d}"
        for k in range(n):
            if onset is None:
                label = False
            else:
                label = 0 < onset - k <= scenario.label_horizon_steps
            records.append(
                TelemetryRecord(dev_id, k * step_s, values[k], label)
            )
    return records


def alarm_bounds(scenario):
    """Per-feature (low, high) alarm bounds in denormalized units.

    For drifted features the bound sits at the ramp value reached
    ``cross_margin_steps`` before onset; everything else is unbounded.
    These are the scenario-calibrated operational limits whose predicted
    crossing constitutes a prognosis alarm.
    """
    bounds = {}
    lead = scenario.lead_steps
    for feat in CATALOG:
        spec = scenario.drift.get(feat.name)
        lo, hi = -math.inf, math.inf
        if spec is not None and spec.kind != "none" and spec.amount != 0.0:
            slope = _ramp_slope(spec, lead, scenario.samples_per_day)
            level = slope * (lead - scenario.cross_margin_steps)
            if spec.amount > 0:
                hi = feat.nominal + level
            else:
                lo = feat.nominal + level
        bounds[feat.name] = (lo, hi)
    return bounds


def fault_onset_seconds(scenario):
    """Device id -> onset time in seconds (original, un-pseudonymized ids)."""
    step_s = scenario.step_seconds()
    return {
        f"otn-node-{dev:03d}": scenario.onset_step(dev) * step_s
        for dev in scenario.fault_onset_day
    }
