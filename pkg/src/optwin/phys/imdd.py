"""Intensity-modulation / direct-detection waveform path.

PAM levels are equidistant in optical power (level k of L maps to power
k/(L-1) before launch-power scaling), so square-law detection sees evenly
spaced eye levels. PAM-4 uses Gray bit mapping.
"""

import numpy as np

from optwin.errors import ConfigError, PreconditionError
from optwin.phys.field import OpticalField, dbm_to_w

GRAY_TO_LEVEL = {2: {(0,): 0, (1,): 1}, 4: {(0, 0): 0, (0, 1): 1, (1, 1): 2, (1, 0): 3}}
LEVEL_TO_GRAY = {
    lv: {v: k for k, v in m.items()} for lv, m in GRAY_TO_LEVEL.items()
}

RC_ROLLOFF = 0.25
RC_SPAN_SYMBOLS = 8


def _raised_cosine_taps(sps, rolloff=RC_ROLLOFF, span=RC_SPAN_SYMBOLS):
    t = np.arange(-span * sps // 2, span * sps // 2 + 1) / sps
    with np.errstate(divide="ignore", invalid="ignore"):
        taps = np.sinc(t) * np.cos(np.pi * rolloff * t) / (1 - (2 * rolloff * t) ** 2)
    # limit points of the closed form
    taps[np.isnan(taps) | np.isinf(taps)] = np.pi / 4 * np.sinc(1 / (2 * rolloff))
    taps[t == 0] = 1.0
    return taps


def bits_to_levels(bits, levels):
    bits = np.asarray(bits, dtype=int)
    k = int(np.log2(levels))
    if bits.size % k != 0:
        raise PreconditionError(f"bit count must be divisible by {k}")
    mapping = GRAY_TO_LEVEL[levels]
    groups = bits.reshape(-1, k)
    return np.array([mapping[tuple(g)] for g in groups], dtype=float)


def levels_to_bits(symbols, levels):
    mapping = LEVEL_TO_GRAY[levels]
    out = []
    for s in symbols:
        out.extend(mapping[int(s)])
    return np.array(out, dtype=int)


def modulate_imdd(
    bits,
    levels=2,
    samples_per_symbol=16,
    pulse="nrz",
    symbol_rate_gbaud=10.0,
    launch_power_dbm=0.0,
):
    """Map bits to a real non-negative PAM amplitude waveform.

    The waveform is scaled so the mean optical power equals the configured
    launch power (skipped for the degenerate all-zero-power frame).
    """
    if levels not in (2, 4):
        raise ConfigError(f"PAM level count must be 2 or 4, got {levels}")
    if pulse not in ("nrz", "raised-cosine"):
        raise ConfigError(f"unknown pulse shape {pulse!r}")
    syms = bits_to_levels(bits, levels)
    rel_power = syms / (levels - 1)  # equidistant power levels in [0, 1]
    sps = int(samples_per_symbol)
    if pulse == "nrz":
        power = np.repeat(rel_power, sps)
    else:
        train = np.zeros(rel_power.size * sps)
        train[sps // 2 :: sps] = rel_power
        taps = _raised_cosine_taps(sps)
        power = np.convolve(train, taps, mode="same")
        power = np.maximum(power, 0.0)  # optical power cannot go negative
    mean_rel = float(np.mean(power))
    if mean_rel > 0.0:
        power = power * (dbm_to_w(launch_power_dbm) / mean_rel)
    dt = 1.0 / (symbol_rate_gbaud * 1e9 * sps)
    return OpticalField(np.sqrt(power).astype(np.complex128), dt, launch_power_dbm)


def detect_direct(field, electrical_bandwidth_hz):
    """Square-law detection |a|^2 followed by a zero-phase low-pass filter.

    The filter applies a 4th-order Butterworth magnitude response in the
    frequency domain (no phase distortion, so symbol centers stay aligned).
    """
    nyquist = 0.5 / field.dt
    if not electrical_bandwidth_hz < nyquist:
        raise PreconditionError("electrical bandwidth must be below Nyquist")
    power = np.abs(field.samples) ** 2
    freqs = np.fft.fftfreq(power.size, field.dt)
    response = 1.0 / np.sqrt(1.0 + (freqs / electrical_bandwidth_hz) ** 8)
    return np.real(np.fft.ifft(np.fft.fft(power) * response))


def decide_bits(detected_power, samples_per_symbol, levels=2):
    """Threshold mid-symbol samples against equidistant power levels.

    The level scale is estimated from the mean of the decision samples
    (uniform PAM levels average to half the top level).
    """
    sps = int(samples_per_symbol)
    centers = detected_power[sps // 2 :: sps]
    scale = 2.0 * float(np.mean(centers))
    if scale <= 0.0:
        return levels_to_bits(np.zeros(centers.size, dtype=int), levels)
    grid = np.arange(levels) / (levels - 1) * scale
    thresholds = (grid[:-1] + grid[1:]) / 2.0
    symbols = np.searchsorted(thresholds, centers)
    return levels_to_bits(symbols, levels)


def ber(bits_ref, bits_got):
    bits_ref = np.asarray(bits_ref, dtype=int)
    bits_got = np.asarray(bits_got, dtype=int)
    if bits_ref.shape != bits_got.shape:
        raise PreconditionError("bit sequences differ in length")
    return float(np.mean(bits_ref != bits_got))
