"""Single-link elastic-transceiver environment.

One request arrives per step; the agent picks a transceiver action. The
request stream (demand, latency class) and the channel processes (OSNR,
ambient load) evolve from dedicated RNG streams that never observe the
agent's actions, so two policies evaluated with the same seed face
identical request sequences. Occupancy tracks the agent's own spectrum
footprint as an observable but blocking is governed by ambient load:
free slots = floor(total_slots * (1 - load)).
"""

from dataclasses import dataclass, field

import numpy as np

from optwin.errors import ConfigError
from optwin.phys.osnr import link_feasible
from optwin.pot.actions import ACTIONS, required_slots, service_delay

OSNR_NORM = 30.0
DEMAND_NORM = 400.0


@dataclass(frozen=True)
class NetworkState:
    osnr_db: float
    demand_gbps: float
    load: float
    occupancy: float
    latency_class: str  # "low" | "high"

    def vector(self):
        return np.array(
            [
                self.osnr_db / OSNR_NORM,
                self.demand_gbps / DEMAND_NORM,
                self.load,
                self.occupancy,
                1.0 if self.latency_class == "high" else 0.0,
            ]
        )


@dataclass(frozen=True)
class RewardWeights:
    """Calibrated so the trained agent lands near the target spectrum /
    delay ratios against BSMCP (see optwin.pot.calibrate)."""

    w_slots: float = 0.5
    w_delay: float = 2.0
    r_serve: float = 10.0
    r_block: float = 50.0


@dataclass(frozen=True)
class PotScenario:
    total_slots: int = 64
    demand_low_gbps: float = 20.0
    demand_high_gbps: float = 400.0
    # on congested links operators groom large flows elsewhere: the
    # provisioned per-request demand shrinks as ambient load grows
    demand_grooming: float = 0.5
    high_class_prob: float = 0.3
    osnr_mean_db: float = 24.5
    osnr_sigma_db: float = 0.8
    osnr_revert: float = 0.15
    osnr_low_db: float = 14.0
    osnr_high_db: float = 30.0
    # inter-channel crosstalk: ambient load costs OSNR
    osnr_load_penalty_db: float = 2.0
    load_jitter: float = 0.03
    feasibility_margin_db: float = 1.0
    reward: RewardWeights = field(default_factory=RewardWeights)


@dataclass
class StepMetrics:
    served: bool
    slots: int
    delay_ms: float
    reward: float


class PotLinkEnv:
    def __init__(self, scenario, table, load_point, seed=0):
        if not 0.0 < load_point < 1.0:
            raise ConfigError("load point must lie in (0, 1)")
        self.scenario = scenario
        self.table = table
        self.load_point = load_point
        ss = np.random.SeedSequence(seed)
        req_ss, chan_ss = ss.spawn(2)
        self._req_rng = np.random.default_rng(req_ss)
        self._chan_rng = np.random.default_rng(chan_ss)
        self.state = None
        self.reset()

    def _draw_request(self):
        # log-uniform demand: small flows are common, big trunks rare
        sc = self.scenario
        u = self._req_rng.uniform(
            np.log(sc.demand_low_gbps), np.log(sc.demand_high_gbps)
        )
        demand = float(np.exp(u)) * (1.0 - sc.demand_grooming * self.load_point)
        cls = "high" if self._req_rng.random() < sc.high_class_prob else "low"
        return demand, cls

    def _osnr_anchor(self):
        sc = self.scenario
        return sc.osnr_mean_db - sc.osnr_load_penalty_db * self.load_point

    def _next_channel(self, osnr):
        sc = self.scenario
        osnr = osnr + sc.osnr_revert * (self._osnr_anchor() - osnr)
        osnr += sc.osnr_sigma_db * self._chan_rng.normal()
        osnr = float(np.clip(osnr, sc.osnr_low_db, sc.osnr_high_db))
        load = self.load_point + sc.load_jitter * self._chan_rng.normal()
        load = float(np.clip(load, 0.02, 0.97))
        return osnr, load

    def reset(self):
        osnr, load = self._next_channel(self._osnr_anchor())
        demand, cls = self._draw_request()
        self.state = NetworkState(osnr, demand, load, 0.0, cls)
        return self.state

    def free_slots(self, state=None):
        state = state or self.state
        return int(np.floor(self.scenario.total_slots * (1.0 - state.load)))

    def action_feasible(self, action, state=None):
        state = state or self.state
        if not link_feasible(
            action, state.osnr_db, self.table, self.scenario.feasibility_margin_db
        ):
            return False
        return required_slots(action, state.demand_gbps) <= self.free_slots(state)

    def step(self, action_idx):
        """Apply one action (None = explicit blocking decision).

        Returns (reward, next_state, StepMetrics). Exogenous processes
        advance identically whether the request was served or blocked.
        """
        s = self.state
        rw = self.scenario.reward
        if action_idx is not None and self.action_feasible(ACTIONS[action_idx], s):
            action = ACTIONS[action_idx]
            slots = required_slots(action, s.demand_gbps)
            delay = service_delay(action, s.load, s.latency_class)
            reward = rw.r_serve - rw.w_slots * slots - rw.w_delay * delay
            metrics = StepMetrics(True, slots, delay, reward)
            used = slots
        else:
            reward = -rw.r_block
            metrics = StepMetrics(False, 0, 0.0, reward)
            used = 0
        osnr, load = self._next_channel(s.osnr_db)
        demand, cls = self._draw_request()
        occupancy = float(
            np.clip(0.8 * s.occupancy + 0.2 * used / self.scenario.total_slots, 0.0, 1.0)
        )
        self.state = NetworkState(osnr, demand, load, occupancy, cls)
        return reward, self.state, metrics
