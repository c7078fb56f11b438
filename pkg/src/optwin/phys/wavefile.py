"""Binary waveform dataset container.

Layout (little endian):

    header:  magic b"OWFD" | uint32 version | uint32 record_count
    record:  float64 distance_km | uint64 seed | float64 dt | uint64 n
             n * complex128 tx samples | n * complex128 rx samples

Version is checked on read; unknown versions are rejected.
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from optwin.errors import SchemaError

MAGIC = b"OWFD"
VERSION = 1
_HEADER = struct.Struct("<4sII")
_REC_HEADER = struct.Struct("<dQdQ")


@dataclass
class WaveformRecord:
    tx: np.ndarray  # complex128
    rx: np.ndarray  # complex128
    dt: float
    distance_km: float
    seed: int

    def __post_init__(self):
        self.tx = np.asarray(self.tx, dtype=np.complex128)
        self.rx = np.asarray(self.rx, dtype=np.complex128)
        if self.tx.shape != self.rx.shape:
            raise SchemaError("tx and rx must have equal sample counts")


def write_waveforms(path, records):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, len(records)))
        for rec in records:
            fh.write(
                _REC_HEADER.pack(rec.distance_km, rec.seed, rec.dt, rec.tx.size)
            )
            fh.write(rec.tx.tobytes())
            fh.write(rec.rx.tobytes())


def read_waveforms(path):
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise SchemaError(f"{path}: truncated header")
        magic, version, count = _HEADER.unpack(head)
        if magic != MAGIC:
            raise SchemaError(f"{path}: not a waveform dataset file")
        if version != VERSION:
            raise SchemaError(f"{path}: unsupported version {version}")
        records = []
        for _ in range(count):
            distance, seed, dt, n = _REC_HEADER.unpack(fh.read(_REC_HEADER.size))
            raw = fh.read(2 * n * 16)
            if len(raw) < 2 * n * 16:
                raise SchemaError(f"{path}: truncated record")
            tx = np.frombuffer(raw[: n * 16], dtype=np.complex128).copy()
            rx = np.frombuffer(raw[n * 16 :], dtype=np.complex128).copy()
            records.append(WaveformRecord(tx, rx, dt, distance, seed))
    return records
