"""The fixed 15-feature equipment-state catalog.

The first five features are the documented fault-relevant quantities for
optical transceivers; the remaining ten round out a realistic OTN board
telemetry set. Order is contractual: CSV columns, windowed datasets, and
tree feature indices all follow it.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Feature:
    name: str
    unit: str
    nominal: float
    low: float
    high: float


FEATURES = (
    Feature("laser bias current", "mA", 50.0, 30.0, 90.0),
    Feature("environment temperature", "degC", 25.0, 5.0, 55.0),
    Feature("output optical power", "dBm", 2.0, -3.0, 5.0),
    Feature("input optical power", "dBm", -8.0, -20.0, 0.0),
    Feature("laser temperature offset", "degC", 0.0, -5.0, 5.0),
    Feature("module supply voltage", "V", 3.3, 3.0, 3.6),
    Feature("TEC current", "mA", 120.0, 0.0, 400.0),
    Feature("chassis fan speed", "rpm", 8000.0, 4000.0, 12000.0),
    Feature("received OSNR", "dB", 28.0, 12.0, 40.0),
    Feature("pre-FEC BER", "log10", -6.0, -12.0, -2.0),
    Feature("CD estimate", "ps/nm", 1360.0, 0.0, 2000.0),
    Feature("uptime", "days", 180.0, 0.0, 10000.0),
    Feature("board humidity", "%RH", 40.0, 10.0, 80.0),
    Feature("transceiver case temperature", "degC", 45.0, 20.0, 80.0),
    Feature("backplane error count", "count", 2.0, 0.0, 100.0),
)


class FeatureCatalog:
    def __init__(self, features=FEATURES):
        self.features = tuple(features)
        if len(self.features) != 15:
            raise ValueError("catalog must hold exactly 15 features")
        self._index = {f.name: i for i, f in enumerate(self.features)}

    def __len__(self):
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    def __getitem__(self, i):
        return self.features[i]

    @property
    def names(self):
        return [f.name for f in self.features]

    def index(self, name):
        return self._index[name]

    def nominals(self):
        import numpy as np

        return np.array([f.nominal for f in self.features])


CATALOG = FeatureCatalog()
