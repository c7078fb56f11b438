"""Analytic OSNR budget and transceiver feasibility.

The budget accumulates per-span ASE in the 0.1 nm reference bandwidth:

    P_ase_span = NF_lin * G_lin * h * nu * B_ref

and propagates both signal and previously generated ASE through each
span's loss and gain. OSNR is reported in dB at the link output.

Required-OSNR values per (modulation format, symbol rate, FEC overhead)
ship as a data file and are treated as configuration, not physics.
"""

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from optwin.errors import ConfigError
from optwin.phys.fiber import (
    PLANCK_J_S,
    REFERENCE_FREQUENCY_HZ,
    REFERENCE_WAVELENGTH_M,
    SPEED_OF_LIGHT_M_S,
)

# 0.1 nm at 1550 nm expressed in Hz
REFERENCE_BANDWIDTH_HZ = (
    SPEED_OF_LIGHT_M_S * 0.1e-9 / REFERENCE_WAVELENGTH_M**2
)

BITS_PER_SYMBOL = {"BPSK": 1, "QPSK": 2, "8QAM": 3, "16QAM": 4}


def estimate_osnr(link):
    """Link-output OSNR in dB for the analytic per-span ASE budget."""
    p_sig = 10.0 ** (link.launch_power_dbm / 10.0) * 1e-3  # W
    p_ase = 0.0
    for fiber, amp in link.spans:
        loss_lin = 10.0 ** (-fiber.attenuation_db_per_km * fiber.length_km / 10.0)
        g_lin = 10.0 ** (amp.gain_db / 10.0)
        nf_lin = 10.0 ** (amp.noise_figure_db / 10.0)
        p_sig = p_sig * loss_lin * g_lin
        p_ase = p_ase * loss_lin * g_lin
        p_ase += nf_lin * g_lin * PLANCK_J_S * REFERENCE_FREQUENCY_HZ * REFERENCE_BANDWIDTH_HZ
    return float(10.0 * np.log10(p_sig / p_ase))


def _action_key(action):
    """(modulation, symbol rate GBaud, FEC percent) from an action-like object."""
    if isinstance(action, tuple):
        return action
    return (action.modulation, action.symbol_rate_gbaud, action.fec_percent)


@dataclass(frozen=True)
class RequiredOsnrTable:
    """Map (modulation, symbol rate, FEC percent) -> required OSNR (dB)."""

    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "_map", dict(self.entries))
        self._validate()

    def _validate(self):
        by_sr_fec = {}
        for (mf, sr, fec), req in self._map.items():
            if mf not in BITS_PER_SYMBOL:
                raise ConfigError(f"unknown modulation format {mf!r}")
            by_sr_fec.setdefault((sr, fec), []).append((BITS_PER_SYMBOL[mf], req))
        for (sr, fec), rows in by_sr_fec.items():
            rows.sort()
            reqs = [r for _, r in rows]
            if any(b >= a for a, b in zip(reqs[1:], reqs)):
                raise ConfigError(
                    f"required OSNR must increase with bits/symbol at SR={sr}, FEC={fec}%"
                )
        for (mf, sr, fec), req in self._map.items():
            for (mf2, sr2, fec2), req2 in self._map.items():
                if mf2 == mf and sr2 == sr and fec2 > fec and req2 >= req:
                    raise ConfigError(
                        f"stronger FEC must lower required OSNR ({mf} {sr} GBaud)"
                    )

    def required(self, action):
        key = _action_key(action)
        try:
            return self._map[key]
        except KeyError:
            raise ConfigError(f"action {key} not present in the required-OSNR table")

    def __contains__(self, action):
        return _action_key(action) in self._map

    @classmethod
    def from_mapping(cls, mapping):
        return cls(tuple(sorted(mapping.items())))

    @classmethod
    def default(cls):
        raw = json.loads(
            resources.files("optwin.phys").joinpath("data/required_osnr.json").read_text()
        )
        entries = {}
        for key, val in raw["required_osnr_db"].items():
            mf, sr, fec = key.split(":")
            entries[(mf, int(sr), int(fec))] = float(val)
        return cls.from_mapping(entries)


def link_feasible(action, osnr_db, table, margin_db=1.0):
    """True iff the available OSNR covers the requirement plus margin."""
    return osnr_db >= table.required(action) + margin_db
