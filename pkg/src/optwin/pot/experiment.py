"""Frozen-policy evaluation across load points with paired request streams.

Environment seeds are derived from (experiment seed, episode) only, never
from the policy or the load point, so DRL and BSMCP evaluations with the
same seed face identical request sequences, and the load points differ
only in ambient load and its OSNR penalty.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from optwin.errors import ConfigError
from optwin.pot.bsmcp import bsmcp_select
from optwin.pot.env import PotLinkEnv

BLOCK_ACTION = -1


@dataclass
class EpisodeMetrics:
    load: float
    policy: str
    mean_slots: float
    mean_delay_ms: float
    blocking: int
    total_reward: float
    served: int


def _policy_action(policy, agent, env, state, rng):
    if policy == "bsmcp":
        return bsmcp_select(env, state)
    if policy == "drl":
        return agent.select_action(state.vector(), 0.0, rng)
    raise ConfigError(f"unknown policy {policy!r}")


def run_experiment(
    scenario,
    table,
    policy,
    agent=None,
    load_points=(0.1, 0.3, 0.5, 0.7, 0.9),
    episodes=3,
    episode_length=200,
    seed=0,
):
    """Evaluate one policy; returns a list of per-load EpisodeMetrics."""
    if policy == "drl" and agent is None:
        raise ConfigError("drl policy requires a trained agent")
    rng = np.random.default_rng(seed)  # only used for drl tie-free greedy calls
    rows = []
    for load in load_points:
        slots_sum = 0
        delay_sum = 0.0
        served = 0
        blocked = 0
        reward_total = 0.0
        for ep in range(episodes):
            env_seed = (seed * 1_000_003 + ep) & (2**63 - 1)
            env = PotLinkEnv(scenario, table, load, seed=env_seed)
            state = env.state
            for _ in range(episode_length):
                action = _policy_action(policy, agent, env, state, rng)
                reward, state, metrics = env.step(action)
                reward_total += reward
                if metrics.served:
                    served += 1
                    slots_sum += metrics.slots
                    delay_sum += metrics.delay_ms
                else:
                    blocked += 1
        rows.append(
            EpisodeMetrics(
                load=load,
                policy=policy,
                mean_slots=slots_sum / served if served else 0.0,
                mean_delay_ms=delay_sum / served if served else 0.0,
                blocking=blocked,
                total_reward=reward_total,
                served=served,
            )
        )
    return rows


def export_metrics_csv(rows, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["load", "policy", "mean_slots", "mean_delay_ms", "blocking", "total_reward", "served"]
        )
        for r in rows:
            writer.writerow(
                [
                    repr(r.load),
                    r.policy,
                    repr(r.mean_slots),
                    repr(r.mean_delay_ms),
                    r.blocking,
                    repr(r.total_reward),
                    r.served,
                ]
            )
    return path
