"""Complex baseband optical field and power bookkeeping.

Sample amplitudes are in sqrt-Watt, so |a|^2 is instantaneous power in W.
"""

from dataclasses import dataclass, field

import numpy as np

from optwin.errors import DimensionError, NumericError


@dataclass
class OpticalField:
    samples: np.ndarray  # complex128
    dt: float  # seconds per sample
    center_power_dbm: float = 0.0  # configured launch power of the frame

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise DimensionError("field samples must be a non-empty 1-D array")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not np.isfinite(self.samples.view(np.float64)).all():
            raise NumericError("field contains non-finite samples")

    def copy(self):
        return OpticalField(self.samples.copy(), self.dt, self.center_power_dbm)

    @property
    def sample_rate(self):
        return 1.0 / self.dt


def dbm_to_w(dbm):
    return 10.0 ** (dbm / 10.0) * 1e-3


def w_to_dbm(watts):
    return 10.0 * np.log10(watts / 1e-3)


def mean_power_w(field):
    return float(np.mean(np.abs(field.samples) ** 2))


def mean_power_dbm(field):
    return float(w_to_dbm(mean_power_w(field)))
