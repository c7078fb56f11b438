"""Transmit/receive waveform pair generation against the physics oracle.

Each pair runs random bits through the IM/DD transmitter and the
split-step fiber (plus a loss-compensating amplifier for nonzero
distances). Distance 0 is the identity channel: rx is bit-exactly tx.
"""

from dataclasses import dataclass

import numpy as np

from optwin.errors import PreconditionError
from optwin.phys import (
    AmplifierSpec,
    FiberSpec,
    OpticalField,
    WaveformRecord,
    edfa_amplify,
    modulate_imdd,
    read_waveforms,
    ssfm_propagate,
    write_waveforms,
)

MAX_DISTANCE_KM = 80.0


@dataclass(frozen=True)
class ChannelDataConfig:
    symbols_per_frame: int = 48
    samples_per_symbol: int = 16
    levels: int = 2
    pulse: str = "raised-cosine"  # band-limited transmitter
    symbol_rate_gbaud: float = 10.0
    launch_power_dbm: float = 3.0
    attenuation_db_per_km: float = 0.2
    beta2_ps2_per_km: float = -21.7
    gamma_per_w_km: float = 1.3
    step_km: float = 0.1
    noise_figure_db: float = 5.0
    amplifier_noise: bool = False  # noiseless by default: surrogate fits the channel


@dataclass
class WaveformPair:
    tx: OpticalField
    rx: OpticalField  # pre-photodetector complex field
    distance_km: float
    seed: int

    def __post_init__(self):
        if self.tx.samples.size != self.rx.samples.size:
            raise PreconditionError("tx/rx sample counts differ")
        if self.tx.dt != self.rx.dt:
            raise PreconditionError("tx/rx sample spacing differs")
        if not 0.0 <= self.distance_km <= MAX_DISTANCE_KM:
            raise PreconditionError(
                f"distance {self.distance_km} outside [0, {MAX_DISTANCE_KM}] km"
            )


def _run_channel(tx, distance_km, config, noise_seed):
    if distance_km == 0.0:
        return tx.copy()
    fiber = FiberSpec(
        distance_km,
        config.attenuation_db_per_km,
        config.beta2_ps2_per_km,
        config.gamma_per_w_km,
    )
    rx = ssfm_propagate(tx, fiber, config.step_km)
    amp = AmplifierSpec(
        gain_db=config.attenuation_db_per_km * distance_km,
        noise_figure_db=config.noise_figure_db,
    )
    return edfa_amplify(rx, amp, seed=noise_seed, add_noise=config.amplifier_noise)


def build_dataset(config, distances, frames, seed=0):
    """One WaveformPair per (distance, frame); deterministic per seed."""
    for d in distances:
        if not 0.0 <= d <= MAX_DISTANCE_KM:
            raise PreconditionError(f"distance {d} outside [0, {MAX_DISTANCE_KM}] km")
    ss = np.random.SeedSequence(seed)
    pairs = []
    bits_per_symbol = int(np.log2(config.levels))
    n_bits = config.symbols_per_frame * bits_per_symbol
    for d in distances:
        for child in ss.spawn(frames):
            rng = np.random.default_rng(child)
            frame_seed = int(rng.integers(0, 2**63 - 1))
            bits = rng.integers(0, 2, size=n_bits)
            tx = modulate_imdd(
                bits,
                levels=config.levels,
                samples_per_symbol=config.samples_per_symbol,
                pulse=config.pulse,
                symbol_rate_gbaud=config.symbol_rate_gbaud,
                launch_power_dbm=config.launch_power_dbm,
            )
            rx = _run_channel(tx, d, config, noise_seed=frame_seed)
            pairs.append(WaveformPair(tx, rx, float(d), frame_seed))
    return pairs


def save_pairs(path, pairs):
    records = [
        WaveformRecord(p.tx.samples, p.rx.samples, p.tx.dt, p.distance_km, p.seed)
        for p in pairs
    ]
    write_waveforms(path, records)


def load_pairs(path):
    pairs = []
    for rec in read_waveforms(path):
        tx = OpticalField(rec.tx, rec.dt)
        rx = OpticalField(rec.rx, rec.dt)
        pairs.append(WaveformPair(tx, rx, rec.distance_km, rec.seed))
    return pairs
