"""Double deep-Q agent: evolving (online) and modeling (target) networks.

The evolving network trains every step and selects the next-state action;
the modeling network evaluates that action and only changes at explicit
sync points (bit-exact parameter copy). Per training step:

    a* = argmax_a Q_evolving(s', a)
    y  = r + gamma * Q_modeling(s', a*)      (y = r when terminal)

with Huber loss on Q_evolving(s, a) and one clipped Adam step on the
evolving network only.
"""

from dataclasses import dataclass, field

import numpy as np

from optwin.errors import NumericError, PreconditionError
from optwin.nn import Adam, Mlp, clip_global_norm
from optwin.nn.checkpoint import load_checkpoint, save_checkpoint
from optwin.nn.losses import loss_and_grad
from optwin.nn.model import copy_parameters
from optwin.pot.env import PotLinkEnv

CHECKPOINT_KIND = "pot-dqn"


@dataclass(frozen=True)
class AgentConfig:
    state_dim: int = 5
    n_actions: int = 24
    hidden: int = 64
    buffer_capacity: int = 10_000
    batch_size: int = 64
    learning_rate: float = 1e-3
    gamma: float = 0.95
    sync_every: int = 250
    eps_start: float = 1.0
    eps_end: float = 0.05
    warmup: int = 500


@dataclass
class Transition:
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    terminal: bool = False


class ReplayBuffer:
    """Fixed-capacity ring with strictly FIFO eviction."""

    def __init__(self, capacity):
        self.capacity = capacity
        self._data = []
        self._next = 0

    def push(self, transition):
        if len(self._data) < self.capacity:
            self._data.append(transition)
        else:
            self._data[self._next] = transition
        self._next = (self._next + 1) % self.capacity

    def __len__(self):
        return len(self._data)

    def sample(self, batch_size, rng):
        idx = rng.integers(0, len(self._data), size=batch_size)
        return [self._data[i] for i in idx]


class DqnAgent:
    def __init__(self, config=AgentConfig(), seed=0):
        self.config = config
        rng = np.random.default_rng(seed)
        sizes = [config.state_dim, config.hidden, config.hidden, config.n_actions]
        self.evolving = Mlp(sizes, rng=rng)
        self.modeling = Mlp(sizes, rng=rng)
        copy_parameters(self.evolving, self.modeling)
        self.optimizer = Adam(self.evolving.parameters(), config.learning_rate)
        self.buffer = ReplayBuffer(config.buffer_capacity)
        self.sync_count = 0
        self.train_steps = 0

    def q_values(self, state_vec):
        return self.evolving.forward(
            np.asarray(state_vec, dtype=np.float64)[None, :], train=False
        )[0]

    def select_action(self, state_vec, epsilon, rng):
        """Epsilon-greedy on the evolving network; lowest index on ties."""
        if not 0.0 <= epsilon <= 1.0:
            raise PreconditionError("epsilon must lie in [0, 1]")
        if epsilon > 0.0 and rng.random() < epsilon:
            return int(rng.integers(0, self.config.n_actions))
        return int(np.argmax(self.q_values(state_vec)))

    def sync_modeling(self):
        copy_parameters(self.evolving, self.modeling)
        self.sync_count += 1

    def train_step(self, batch):
        """One double-DQN update on the evolving network. Returns the loss."""
        if not batch:
            raise PreconditionError("empty training batch")
        cfg = self.config
        states = np.stack([t.state for t in batch])
        next_states = np.stack([t.next_state for t in batch])
        actions = np.array([t.action for t in batch], dtype=int)
        rewards = np.array([t.reward for t in batch])
        terminal = np.array([t.terminal for t in batch], dtype=bool)

        a_star = np.argmax(self.evolving.forward(next_states, train=False), axis=1)
        q_next = self.modeling.forward(next_states, train=False)[
            np.arange(len(batch)), a_star
        ]
        y = rewards + cfg.gamma * q_next * (~terminal)
        if not np.isfinite(y).all():
            raise NumericError("non-finite double-DQN target")

        q_all = self.evolving.forward(states, train=True)
        rows = np.arange(len(batch))
        loss, dq = loss_and_grad("huber", q_all[rows, actions], y)
        dout = np.zeros_like(q_all)
        dout[rows, actions] = dq
        self.evolving.zero_gradients()
        self.evolving.backward(dout)
        grads = self.evolving.gradients()
        clip_global_norm(grads)
        self.optimizer.update(self.evolving.parameters(), grads)
        self.train_steps += 1
        return loss

    def save(self, path):
        arrays = {}
        for k, v in self.evolving.parameters().items():
            arrays[f"evolving.{k}"] = v
        for k, v in self.modeling.parameters().items():
            arrays[f"modeling.{k}"] = v
        from dataclasses import asdict

        save_checkpoint(path, CHECKPOINT_KIND, arrays, {"config": asdict(self.config)})

    @classmethod
    def load(cls, path):
        _, arrays, meta = load_checkpoint(path, expect_kind=CHECKPOINT_KIND)
        agent = cls(AgentConfig(**meta["config"]))
        for prefix, net in (("evolving", agent.evolving), ("modeling", agent.modeling)):
            params = net.parameters()
            for k in params:
                params[k][...] = arrays[f"{prefix}.{k}"]
        return agent


@dataclass
class TrainCurve:
    rewards: list = field(default_factory=list)
    losses: list = field(default_factory=list)


def train_agent(
    scenario,
    table,
    steps=30_000,
    episode_length=200,
    load_points=(0.1, 0.3, 0.5, 0.7, 0.9),
    config=AgentConfig(),
    seed=0,
):
    """Train a DQN agent on the link environment, deterministic per seed.

    Episodes cycle through the load points so the policy sees the whole
    evaluation range; epsilon anneals linearly over the first half of
    training.
    """
    rng = np.random.default_rng(seed)
    agent = DqnAgent(config, seed=seed)
    curve = TrainCurve()
    anneal_steps = steps // 2
    step = 0
    episode = 0
    while step < steps:
        load = load_points[episode % len(load_points)]
        env = PotLinkEnv(scenario, table, load, seed=int(rng.integers(0, 2**63 - 1)))
        state = env.state
        ep_reward = 0.0
        for _ in range(episode_length):
            frac = min(1.0, step / max(1, anneal_steps))
            eps = config.eps_start + (config.eps_end - config.eps_start) * frac
            action = agent.select_action(state.vector(), eps, rng)
            reward, next_state, _ = env.step(action)
            agent.buffer.push(
                Transition(state.vector(), action, reward, next_state.vector())
            )
            if len(agent.buffer) >= config.warmup:
                batch = agent.buffer.sample(config.batch_size, rng)
                curve.losses.append(agent.train_step(batch))
                if agent.train_steps % config.sync_every == 0:
                    agent.sync_modeling()
            state = next_state
            ep_reward += reward
            step += 1
            if step >= steps:
                break
        curve.rewards.append(ep_reward)
        episode += 1
    return agent, curve
