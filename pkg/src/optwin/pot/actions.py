"""Transceiver action space: modulation format, symbol rate, FEC overhead.

Spectrum model (12.5 GHz flex-grid slots):

    carrier capacity [Gb/s] = SR * bits_per_symbol / (1 + FEC overhead)
    carrier width [GHz]     = SR * (1 + roll-off) + guard band
    slots                   = ceil(carriers_needed * carrier_width / 12.5)

with roll-off 0.15 and a 6.25 GHz guard band per carrier. The slot count
therefore floors at one carrier's width even as demand approaches zero.

Delay model [ms]:

    delay = propagation + FEC decoding latency
            + queue_coeff(class) * load/(1-load) * (100 / line rate Gb/s)

FEC latency rises with overhead; the queueing term is scaled by raw line
rate (SR * bits_per_symbol) so at equal load, changing only the FEC level
shifts delay by exactly the difference of the documented constants.
High-sensitivity traffic is queued with priority (smaller coefficient).
"""

import math
from dataclasses import dataclass

from optwin.errors import SaturationError
from optwin.phys.osnr import BITS_PER_SYMBOL

SLOT_GHZ = 12.5
CARRIER_ROLLOFF = 0.15
CARRIER_GUARD_GHZ = 6.25

PROPAGATION_MS = 1.0
FEC_LATENCY_MS = {7: 0.05, 15: 0.12, 25: 0.30}
QUEUE_COEFF_MS = {"high": 0.0075, "low": 0.015}
QUEUE_REFERENCE_GBPS = 100.0


@dataclass(frozen=True)
class PotAction:
    modulation: str
    symbol_rate_gbaud: int
    fec_percent: int

    @property
    def fec_overhead(self):
        return self.fec_percent / 100.0

    @property
    def bits_per_symbol(self):
        return BITS_PER_SYMBOL[self.modulation]

    def key(self):
        return (self.modulation, self.symbol_rate_gbaud, self.fec_percent)


ACTIONS = tuple(
    PotAction(mf, sr, fec)
    for mf in ("BPSK", "QPSK", "8QAM", "16QAM")
    for sr in (28, 56)
    for fec in (7, 15, 25)
)

_INDEX = {a: i for i, a in enumerate(ACTIONS)}


def action_index(action):
    return _INDEX[action]


def carrier_capacity_gbps(action):
    return action.symbol_rate_gbaud * action.bits_per_symbol / (1.0 + action.fec_overhead)


def carrier_width_ghz(action):
    return action.symbol_rate_gbaud * (1.0 + CARRIER_ROLLOFF) + CARRIER_GUARD_GHZ


def required_slots(action, demand_gbps):
    """Flex-grid slots needed to serve ``demand_gbps`` with this action."""
    if demand_gbps <= 0:
        raise ValueError("demand must be positive")
    carriers = math.ceil(demand_gbps / carrier_capacity_gbps(action))
    return math.ceil(carriers * carrier_width_ghz(action) / SLOT_GHZ)


def service_delay(action, load, latency_class):
    """Per-service delay in milliseconds at normalized ambient load."""
    if not 0.0 <= load < 1.0:
        raise SaturationError("load must lie in [0, 1)")
    line_rate = action.symbol_rate_gbaud * action.bits_per_symbol
    queue = (
        QUEUE_COEFF_MS[latency_class]
        * (load / (1.0 - load))
        * (QUEUE_REFERENCE_GBPS / line_rate)
    )
    return PROPAGATION_MS + FEC_LATENCY_MS[action.fec_percent] + queue
