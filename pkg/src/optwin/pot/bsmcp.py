"""Brute-force search with maximum capability provisioning.

Exhaustively scans all 24 actions; among those feasible for the current
request (OSNR requirement met and slots available) it picks the maximum
carrier capacity, breaking ties toward fewer required slots and then the
lowest action index. Returns None (blocking) when nothing is feasible.
"""

from optwin.pot.actions import ACTIONS, carrier_capacity_gbps, required_slots


def bsmcp_select(env, state=None):
    state = state or env.state
    best = None
    best_key = None
    for idx, action in enumerate(ACTIONS):
        if not env.action_feasible(action, state):
            continue
        key = (
            -carrier_capacity_gbps(action),
            required_slots(action, state.demand_gbps),
            idx,
        )
        if best_key is None or key < best_key:
            best_key = key
            best = idx
    return best
