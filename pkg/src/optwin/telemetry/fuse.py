"""Data-layer fusion: desensitize, clean, rename, clip.

Fusion is idempotent: pseudonyms are recognized and kept, filled values
stay filled, clipped values stay inside range.
"""

import hashlib
import re
from dataclasses import dataclass, field

import numpy as np

from optwin.errors import SchemaError
from optwin.telemetry.catalog import CATALOG
from optwin.telemetry.records import TelemetryRecord, group_by_device

_PSEUDONYM_RE = re.compile(r"^dev-[0-9a-f]{10}$")


def pseudonymize(device_id):
    if _PSEUDONYM_RE.match(device_id):
        return device_id
    digest = hashlib.sha1(device_id.encode()).hexdigest()[:10]
    return f"dev-{digest}"


@dataclass
class FuseResult:
    records: list
    fill_count: int = 0
    clip_count: int = 0
    pseudonyms: dict = field(default_factory=dict)  # original -> stable pseudonym


def _features_array(rec, catalog):
    """Accept either catalog-ordered arrays or name -> value mappings."""
    if isinstance(rec.features, dict):
        arr = np.full(15, np.nan)
        for name, val in rec.features.items():
            if name not in catalog.names:
                raise SchemaError(f"unknown feature name {name!r}")
            arr[catalog.index(name)] = val
        return arr
    return np.asarray(rec.features, dtype=np.float64)


def fuse(records, catalog=CATALOG):
    """Clean record list: stable pseudonyms, no missing values, in-range.

    Missing values are filled per device by last-observation-carried-
    forward; leading gaps use the device's per-feature median. Values
    outside the catalog's nominal range are clipped and counted.
    """
    prepared = [
        TelemetryRecord(
            rec.device_id, rec.timestamp, _features_array(rec, catalog),
            rec.fault_within_horizon,
        )
        for rec in records
    ]
    grouped = group_by_device(prepared)
    low = np.array([f.low for f in catalog])
    high = np.array([f.high for f in catalog])
    out = []
    fill_count = 0
    clip_count = 0
    pseudonyms = {}
    for dev, recs in grouped.items():
        anon = pseudonymize(dev)
        pseudonyms[dev] = anon
        series = np.stack([r.features for r in recs])
        missing = np.isnan(series)
        fill_count += int(missing.sum())
        for j in range(series.shape[1]):
            col = series[:, j]
            nan = np.isnan(col)
            if nan.all():
                col[:] = catalog[j].nominal
                continue
            median = float(np.median(col[~nan]))
            last = median  # leading gaps fall back to the device median
            for i in range(col.size):
                if np.isnan(col[i]):
                    col[i] = last
                else:
                    last = col[i]
        outside = (series < low) | (series > high)
        clip_count += int(outside.sum())
        series = np.clip(series, low, high)
        for rec, row in zip(recs, series):
            out.append(
                TelemetryRecord(anon, rec.timestamp, row, rec.fault_within_horizon)
            )
    return FuseResult(out, fill_count, clip_count, pseudonyms)
