"""Timestamped per-device equipment state samples."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from optwin.errors import DimensionError


@dataclass
class TelemetryRecord:
    device_id: str
    timestamp: float  # seconds since scenario start
    features: np.ndarray  # (15,), NaN marks a missing entry
    fault_within_horizon: Optional[bool] = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.shape != (15,):
            raise DimensionError(
                f"record must carry exactly 15 features, got {self.features.shape}"
            )


def group_by_device(records):
    """Ordered device -> time-sorted record list; timestamps must be
    strictly increasing per device."""
    grouped = {}
    for rec in records:
        grouped.setdefault(rec.device_id, []).append(rec)
    for dev, recs in grouped.items():
        recs.sort(key=lambda r: r.timestamp)
        ts = [r.timestamp for r in recs]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError(f"timestamps not strictly increasing for {dev}")
    return grouped
