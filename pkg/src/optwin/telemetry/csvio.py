"""Telemetry CSV import/export; header row follows the catalog order."""

import csv
from pathlib import Path

import numpy as np

from optwin.errors import SchemaError
from optwin.telemetry.catalog import CATALOG
from optwin.telemetry.records import TelemetryRecord

_META_COLS = ["device_id", "timestamp"]
_LABEL_COL = "fault_within_horizon"


def export_csv(records, path, catalog=CATALOG):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_META_COLS + catalog.names + [_LABEL_COL])
        for rec in records:
            row = [rec.device_id, repr(rec.timestamp)]
            for v in rec.features:
                row.append("" if np.isnan(v) else repr(float(v)))
            if rec.fault_within_horizon is None:
                row.append("")
            else:
                row.append("1" if rec.fault_within_horizon else "0")
            writer.writerow(row)


def import_csv(path, catalog=CATALOG):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = _META_COLS + catalog.names + [_LABEL_COL]
        if header != expected:
            raise SchemaError(f"{path}: header does not match the feature catalog")
        records = []
        for row in reader:
            feats = np.array(
                [np.nan if cell == "" else float(cell) for cell in row[2:17]]
            )
            label_cell = row[17]
            label = None if label_cell == "" else label_cell == "1"
            records.append(
                TelemetryRecord(row[0], float(row[1]), feats, label)
            )
    return records
