"""Synthetic equipment telemetry and the data-fusion pipeline."""

from optwin.telemetry.catalog import CATALOG, Feature, FeatureCatalog
from optwin.telemetry.records import TelemetryRecord
from optwin.telemetry.scenario import (
    DegradationScenario,
    DriftSpec,
    alarm_bounds,
    default_prognosis_scenario,
    diagnosis_scenario,
    generate_fleet,
)
from optwin.telemetry.fuse import FuseResult, fuse
from optwin.telemetry.windows import (
    WindowedDataset,
    augment,
    balance,
    make_windows,
    split_records_by_day,
)
from optwin.telemetry.csvio import export_csv, import_csv

__all__ = [
    "CATALOG",
    "Feature",
    "FeatureCatalog",
    "TelemetryRecord",
    "DegradationScenario",
    "DriftSpec",
    "generate_fleet",
    "alarm_bounds",
    "default_prognosis_scenario",
    "diagnosis_scenario",
    "fuse",
    "FuseResult",
    "WindowedDataset",
    "make_windows",
    "balance",
    "augment",
    "split_records_by_day",
    "export_csv",
    "import_csv",
]
