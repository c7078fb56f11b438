"""Ground-truth physical layer: waveform propagation and link budgets."""

from optwin.phys.field import OpticalField, dbm_to_w, mean_power_dbm, mean_power_w, w_to_dbm
from optwin.phys.fiber import (
    AmplifierSpec,
    FiberSpec,
    LinkSpec,
    edfa_amplify,
    ssfm_propagate,
)
from optwin.phys.imdd import (
    ber,
    decide_bits,
    detect_direct,
    modulate_imdd,
)
from optwin.phys.osnr import RequiredOsnrTable, estimate_osnr, link_feasible
from optwin.phys.wavefile import WaveformRecord, read_waveforms, write_waveforms

__all__ = [
    "OpticalField",
    "mean_power_w",
    "mean_power_dbm",
    "dbm_to_w",
    "w_to_dbm",
    "FiberSpec",
    "AmplifierSpec",
    "LinkSpec",
    "ssfm_propagate",
    "edfa_amplify",
    "modulate_imdd",
    "detect_direct",
    "decide_bits",
    "ber",
    "estimate_osnr",
    "link_feasible",
    "RequiredOsnrTable",
    "WaveformRecord",
    "read_waveforms",
    "write_waveforms",
]
