"""Reward-weight calibration sweep for the POT agent.

Run as ``python -m optwin.pot.calibrate`` to reproduce the weight choice:
trains a short agent per candidate weight set and prints the resulting
spectrum ratio and delay delta against BSMCP under paired streams.
"""

import numpy as np

from optwin.phys import RequiredOsnrTable
from optwin.pot.agent import train_agent
from optwin.pot.env import PotScenario, RewardWeights
from optwin.pot.experiment import run_experiment


def evaluate_weights(weights, steps=30_000, seed=0, eval_seed=42):
    table = RequiredOsnrTable.default()
    scenario = PotScenario(reward=weights)
    agent, _ = train_agent(scenario, table, steps=steps, seed=seed)
    drl = run_experiment(scenario, table, "drl", agent=agent, seed=eval_seed)
    bsmcp = run_experiment(scenario, table, "bsmcp", seed=eval_seed)
    ratio = np.mean([r.mean_slots for r in drl]) / np.mean(
        [r.mean_slots for r in bsmcp]
    )
    d_drl = sum(r.mean_delay_ms * r.served for r in drl) / sum(r.served for r in drl)
    d_bs = sum(r.mean_delay_ms * r.served for r in bsmcp) / sum(
        r.served for r in bsmcp
    )
    return ratio, d_drl / d_bs - 1.0


def main():
    candidates = [
        RewardWeights(w_slots=0.5, w_delay=1.0),
        RewardWeights(w_slots=0.5, w_delay=2.0),
        RewardWeights(w_slots=1.0, w_delay=2.0),
    ]
    print(f"{'w_slots':>8} {'w_delay':>8} {'spectrum ratio':>15} {'delay delta':>12}")
    for w in candidates:
        ratio, delta = evaluate_weights(w)
        print(f"{w.w_slots:8.2f} {w.w_delay:8.2f} {ratio:15.3f} {delta:+12.2%}")


if __name__ == "__main__":
    main()
