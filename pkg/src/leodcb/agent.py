"""Enhanced dueling DQN agent: masked epsilon-greedy selection, replay,
target network, scalarized TD learning under a task weight vector."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import neural
from .env import DcbUplinkEnv
from .errors import ConfigError, StateError
from .neural import AdamState, QNetworkParams

STATE_DIM = 2  # (slot / T, prev_satellite / N_L)


@dataclass(frozen=True, eq=False)
class Transition:
    state: np.ndarray           # encoding at decision time
    action: int                 # flat action index, legitimate when taken
    reward: np.ndarray          # 3-component reward vector
    next_state: np.ndarray
    next_mask: np.ndarray       # legitimate-action mask of the NEXT state
    terminal: bool


@dataclass
class AgentConfig:
    gamma: float = 0.96
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    # None = resolved by the training framework to half its total iterations.
    epsilon_decay_iters: int | None = None
    replay_capacity: int = 100_000
    batch_size: int = 256
    target_sync_period: int = 100       # gradient steps between hard copies
    grad_steps_per_iteration: int = 16
    episodes_per_iteration: int = 1
    learning_rate: float = 1e-4
    hidden_sizes: tuple = (2048, 2048)
    max_grad_norm: float = 10.0

    def __post_init__(self):
        if not (0.0 < self.gamma < 1.0):
            raise ConfigError("discount factor must lie in (0, 1)")
        if self.replay_capacity < 1 or self.batch_size < 1:
            raise ConfigError("replay capacity and batch size must be >= 1")


class ReplayBuffer:
    """Fixed-capacity FIFO experience store with uniform sampling."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._items: list[Transition] = []
        self._cursor = 0

    def __len__(self) -> int:
        return len(self._items)

    def push(self, transition: Transition) -> None:
        if len(self._items) < self.capacity:
            self._items.append(transition)
        else:
            self._items[self._cursor] = transition
            self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Transition]:
        idx = rng.choice(len(self._items), size=batch_size, replace=False)
        return [self._items[i] for i in idx]

    def copy(self) -> "ReplayBuffer":
        clone = ReplayBuffer(self.capacity)
        clone._items = list(self._items)    # transitions are immutable
        clone._cursor = self._cursor
        return clone


def select_action(
    params: QNetworkParams,
    state_encoding: np.ndarray,
    legit_mask: np.ndarray,
    epsilon: float,
    rng: np.random.Generator,
) -> int:
    """Masked epsilon-greedy choice over the flat action space.

    Greedy ties break to the lowest action index.
    """
    legit = np.flatnonzero(legit_mask)
    if legit.size == 0:
        raise StateError("legitimate action set is empty")
    if rng.random() < epsilon:
        return int(legit[rng.integers(legit.size)])
    _, _, q = neural.forward(params, state_encoding)
    return int(legit[np.argmax(q[legit])])


def td_targets(
    batch: list[Transition],
    target_params: QNetworkParams,
    weight: np.ndarray,
    gamma: float,
) -> np.ndarray:
    """Scalarized one-step targets with the max over the stored next mask."""
    rewards = np.stack([t.reward for t in batch]) @ np.asarray(weight, dtype=float)
    next_states = np.stack([t.next_state for t in batch])
    next_masks = np.stack([t.next_mask for t in batch])
    terminal = np.array([t.terminal for t in batch])
    _, _, next_q = neural.forward(target_params, next_states)
    masked = np.where(next_masks, next_q, -np.inf)
    best_next = masked.max(axis=1)
    best_next = np.where(terminal | ~next_masks.any(axis=1), 0.0, best_next)
    return rewards + gamma * best_next * (~terminal)


@dataclass(eq=False)
class EnhancedD3qnAgent:
    """One learning task's policy carrier: network, target, replay, Adam."""

    config: AgentConfig
    params: QNetworkParams
    target_params: QNetworkParams
    adam: AdamState
    replay: ReplayBuffer
    rng: np.random.Generator
    iteration: int = 0
    grad_steps_done: int = 0
    last_loss: float = field(default=0.0)

    @classmethod
    def create(cls, config: AgentConfig, n_actions: int, rng: np.random.Generator):
        params = neural.init_params(STATE_DIM, config.hidden_sizes, n_actions, rng)
        return cls(
            config=config,
            params=params,
            target_params=params.clone(),
            adam=neural.init_adam(params),
            replay=ReplayBuffer(config.replay_capacity),
            rng=rng,
        )

    def epsilon(self) -> float:
        cfg = self.config
        if cfg.epsilon_decay_iters is None:
            raise ConfigError("epsilon_decay_iters has not been resolved")
        frac = min(1.0, self.iteration / max(1, cfg.epsilon_decay_iters))
        return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start)

    def clone(self) -> "EnhancedD3qnAgent":
        """Independent deep copy with its own RNG stream."""
        return EnhancedD3qnAgent(
            config=self.config,
            params=self.params.clone(),
            target_params=self.target_params.clone(),
            adam=self.adam.clone(),
            replay=self.replay.copy(),
            rng=np.random.default_rng(int(self.rng.integers(2**63))),
            iteration=self.iteration,
            grad_steps_done=self.grad_steps_done,
        )

    def collect_episode(self, env: DcbUplinkEnv) -> None:
        seed = int(self.rng.integers(2**31))
        state = env.reset(seed)
        eps = self.epsilon()
        while not env.done:
            encoding = env.encode_state(state)
            mask = env.legitimate_mask()
            action = select_action(self.params, encoding, mask, eps, self.rng)
            state, reward, done = env.step(env.action_from_index(action))
            self.replay.push(
                Transition(
                    state=encoding,
                    action=action,
                    reward=reward.as_array(),
                    next_state=env.encode_state(state),
                    next_mask=env.legitimate_mask(),
                    terminal=done,
                )
            )

    def train_iteration(self, env: DcbUplinkEnv, weight: np.ndarray) -> None:
        """Collect episodes, then run the configured gradient steps."""
        cfg = self.config
        for _ in range(cfg.episodes_per_iteration):
            self.collect_episode(env)
        for _ in range(cfg.grad_steps_per_iteration):
            if len(self.replay) < cfg.batch_size:
                break
            batch = self.replay.sample(cfg.batch_size, self.rng)
            targets = td_targets(batch, self.target_params, weight, cfg.gamma)
            grads, self.last_loss = neural.backward(
                self.params,
                np.stack([t.state for t in batch]),
                np.array([t.action for t in batch]),
                targets,
            )
            neural.clip_gradients(grads, cfg.max_grad_norm)
            neural.adam_step(self.params, grads, self.adam, cfg.learning_rate)
            self.grad_steps_done += 1
            if self.grad_steps_done % cfg.target_sync_period == 0:
                self.target_params = self.params.clone()
        self.iteration += 1


def save_agent_state(path, agent: EnhancedD3qnAgent) -> None:
    """Resumable per-task checkpoint: params, target, Adam, schedule position.

    The replay buffer is deliberately not persisted; resuming refills it.
    """
    payload = {
        "iteration": np.array(agent.iteration),
        "grad_steps_done": np.array(agent.grad_steps_done),
        "epsilon": np.array(agent.epsilon()),
        "adam_step": np.array(agent.adam.step),
    }
    for i, tensor in enumerate(agent.params.tensors()):
        payload[f"param_{i}"] = tensor
    for i, tensor in enumerate(agent.target_params.tensors()):
        payload[f"target_{i}"] = tensor
    for i, (m, v) in enumerate(zip(agent.adam.first_moments, agent.adam.second_moments)):
        payload[f"adam_m_{i}"] = m
        payload[f"adam_v_{i}"] = v
    np.savez(path, **payload)


def load_agent_state(path, agent: EnhancedD3qnAgent) -> EnhancedD3qnAgent:
    """Restore a checkpoint into a freshly created agent of matching shape."""
    with np.load(path) as data:
        agent.iteration = int(data["iteration"])
        agent.grad_steps_done = int(data["grad_steps_done"])
        agent.adam.step = int(data["adam_step"])
        for i, tensor in enumerate(agent.params.tensors()):
            tensor[:] = data[f"param_{i}"]
        for i, tensor in enumerate(agent.target_params.tensors()):
            tensor[:] = data[f"target_{i}"]
        for i, (m, v) in enumerate(
            zip(agent.adam.first_moments, agent.adam.second_moments)
        ):
            m[:] = data[f"adam_m_{i}"]
            v[:] = data[f"adam_v_{i}"]
    return agent


def greedy_rollout(params: QNetworkParams, env: DcbUplinkEnv, seed: int):
    """One epsilon = 0 episode; returns the finished environment ledger."""
    state = env.reset(seed)
    while not env.done:
        encoding = env.encode_state(state)
        legit = np.flatnonzero(env.legitimate_mask())
        _, _, q = neural.forward(params, encoding)
        action = int(legit[np.argmax(q[legit])])
        state, _, _ = env.step(env.action_from_index(action))
    return env.ledger


def evaluate_policy(params: QNetworkParams, env: DcbUplinkEnv, seeds) -> np.ndarray:
    """Average objective vector F = (f1_bar, -f2_bar, -f3_bar) over seeds.

    All components are maximized under this sign convention.
    """
    totals = np.zeros(3)
    for seed in seeds:
        greedy_rollout(params, env, seed)
        f1, f2, f3 = env.episode_objectives()
        totals += (f1, -f2, -f3)
    return totals / len(seeds)
