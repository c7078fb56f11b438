"""Programmable-transceiver configuration: environment, DQN agent, baseline."""

from optwin.pot.actions import (
    ACTIONS,
    PotAction,
    action_index,
    carrier_capacity_gbps,
    required_slots,
    service_delay,
)
from optwin.pot.env import NetworkState, PotLinkEnv, PotScenario, RewardWeights
from optwin.pot.agent import AgentConfig, DqnAgent, ReplayBuffer, Transition, train_agent
from optwin.pot.bsmcp import bsmcp_select
from optwin.pot.experiment import EpisodeMetrics, export_metrics_csv, run_experiment

__all__ = [
    "PotAction",
    "ACTIONS",
    "action_index",
    "required_slots",
    "service_delay",
    "carrier_capacity_gbps",
    "NetworkState",
    "PotScenario",
    "PotLinkEnv",
    "RewardWeights",
    "DqnAgent",
    "AgentConfig",
    "ReplayBuffer",
    "Transition",
    "train_agent",
    "bsmcp_select",
    "run_experiment",
    "EpisodeMetrics",
    "export_metrics_csv",
]
