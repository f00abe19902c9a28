"""DQN with uniform replay, a target network, and double-Q targets.

Hyperparameter defaults follow the benchmark settings: discount 0.99, replay
batch 32, double-Q on, epsilon annealed linearly from 1.0 to 0.02 over the
first 10% of training. Per-task network widths and learning rates live in
``defaults.py``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import DimensionMismatch, TextEnv, derive_rng
from .mlp import AdamState, Mlp, adam_step
from .records import RunRecord


class ReplayBuffer:
    """Fixed-capacity ring of (s, a, r, s', done) transitions, uniform sampling."""

    def __init__(self, capacity: int, obs_dim: int):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.next_obs = np.zeros((capacity, obs_dim))
        self.dones = np.zeros(capacity, dtype=bool)
        self.count = 0

    def __len__(self) -> int:
        return min(self.count, self.capacity)

    def push(self, s: np.ndarray, a: int, r: float, s_next: np.ndarray, done: bool) -> None:
        ix = self.count % self.capacity
        self.obs[ix] = s
        self.actions[ix] = a
        self.rewards[ix] = r
        self.next_obs[ix] = s_next
        self.dones[ix] = done
        self.count += 1

    def sample(self, batch_size: int, rng: np.random.Generator):
        ixs = rng.integers(0, len(self), size=batch_size)
        return (
            self.obs[ixs],
            self.actions[ixs],
            self.rewards[ixs],
            self.next_obs[ixs],
            self.dones[ixs],
        )


@dataclass
class DqnConfig:
    gamma: float = 0.99
    batch_size: int = 32
    lr: float = 5e-4
    hidden: tuple[int, ...] = (100, 100)
    activation: str = "relu"
    double_q: bool = True
    exploration_fraction: float = 0.1
    eps_start: float = 1.0
    eps_final: float = 0.02
    buffer_capacity: int = 50_000
    target_sync_interval: int = 500
    train_freq: int = 1
    extras: dict = field(default_factory=dict)


def epsilon_at(step: int, total_steps: int, config: DqnConfig) -> float:
    """Linear anneal from eps_start to eps_final over exploration_fraction of the run."""
    anneal_steps = max(1, int(config.exploration_fraction * total_steps))
    frac = min(1.0, step / anneal_steps)
    return config.eps_start + frac * (config.eps_final - config.eps_start)


def dqn_target(
    r: float, done: bool, q_next_online: np.ndarray, q_next_target: np.ndarray, gamma: float
) -> float:
    """Double-Q bootstrap: the online net picks the action, the target net scores it."""
    q_next_online = np.asarray(q_next_online)
    q_next_target = np.asarray(q_next_target)
    if q_next_online.size == 0 or q_next_online.shape != q_next_target.shape:
        raise DimensionMismatch("next-state Q vectors must be non-empty and same length")
    if done:
        return float(r)
    return float(r + gamma * q_next_target[int(np.argmax(q_next_online))])


class DqnAgent:
    """Q-network plus target network; greedy play via ``act``."""

    def __init__(self, obs_dim: int, n_actions: int, config: DqnConfig, seed: int = 0):
        self.config = config
        sizes = [obs_dim, *config.hidden, n_actions]
        self.online = Mlp(sizes, activation=config.activation, seed=derive_rng(seed, "dqn-init"))
        self.target = self.online.copy()
        self.adam = AdamState.for_net(self.online, config.lr)

    def act(self, obs_vector: np.ndarray) -> int:
        return int(np.argmax(self.online.forward(obs_vector)))

    def update(self, batch) -> float:
        """One gradient step of mean squared TD error on a replay batch."""
        obs, actions, rewards, next_obs, dones = batch
        q_next_target = self.target.forward(next_obs)
        if self.config.double_q:
            q_next_online = self.online.forward(next_obs)
            best = np.argmax(q_next_online, axis=1)
        else:
            best = np.argmax(q_next_target, axis=1)
        bootstrap = q_next_target[np.arange(len(best)), best]
        targets = rewards + self.config.gamma * bootstrap * (~dones)

        q = self.online.forward(obs)
        picked = q[np.arange(len(actions)), actions]
        td = picked - targets
        upstream = np.zeros_like(q)
        upstream[np.arange(len(actions)), actions] = 2.0 * td / len(actions)
        grads = self.online.backward(obs, upstream)
        adam_step(self.online, grads, self.adam)
        return float(np.mean(td * td))

    def sync_target(self) -> None:
        self.target.load_from(self.online)


class DqnTrainer:
    """Epsilon-greedy training loop that can be resumed in small budgets.

    Episode state, the replay buffer, and both rng streams persist across
    ``run()`` calls, so online-mode training is one trainer driven in slices.
    """

    def __init__(self, env: TextEnv, config: DqnConfig, seed: int = 0):
        self.env = env
        self.config = config
        self.seed = seed
        self.agent = DqnAgent(env.observation_dim(), len(env.action_space), config, seed)
        self.explore_rng = derive_rng(seed, "dqn-explore")
        self.batch_rng = derive_rng(seed, "dqn-batches")
        self.buffer = ReplayBuffer(config.buffer_capacity, env.observation_dim())
        self.record = RunRecord(seed=seed)
        self.returns: list[float] = []
        self.step = 0
        self._obs = None
        self._episode_return = 0.0

    def trailing_return(self) -> float:
        return float(np.mean(self.returns[-100:])) if self.returns else 0.0

    def run(
        self,
        steps: int,
        log_every: int | None = 1000,
        eval_fn=None,
        early_stop_return: float | None = None,
        anneal_steps: int | None = None,
    ) -> None:
        """Advance training by ``steps`` env steps.

        Epsilon anneals over ``anneal_steps`` total env steps (defaults to
        this call's budget counted from step 0).
        """
        if steps <= 0:
            return
        config = self.config
        horizon_for_eps = anneal_steps if anneal_steps is not None else self.step + steps
        if self._obs is None:
            self._obs = self.env.reset()
        until = self.step + steps
        while self.step < until:
            eps = epsilon_at(self.step, horizon_for_eps, config)
            if self.explore_rng.random() < eps:
                action = self.env.action_space.sample(self.explore_rng)
            else:
                action = self.agent.act(self._obs.vector)
            next_obs, reward, done, _ = self.env.step(action)
            self.buffer.push(self._obs.vector, action, reward, next_obs.vector, done)
            self._episode_return += reward
            self._obs = next_obs
            self.step += 1

            if done:
                self.returns.append(self._episode_return)
                self._episode_return = 0.0
                self._obs = self.env.reset()

            if len(self.buffer) >= config.batch_size and self.step % config.train_freq == 0:
                self.agent.update(self.buffer.sample(config.batch_size, self.batch_rng))
            if self.step % config.target_sync_interval == 0:
                self.agent.sync_target()

            if log_every and (self.step % log_every == 0 or self.step == until):
                trailing = self.trailing_return()
                score = eval_fn(self.agent) if eval_fn is not None else None
                self.record.log(self.step, trailing, score)
                if (
                    early_stop_return is not None
                    and trailing >= early_stop_return
                    and len(self.returns) >= 100
                ):
                    return


def train_dqn(
    env: TextEnv,
    config: DqnConfig,
    total_steps: int,
    seed: int = 0,
    log_every: int = 1000,
    eval_fn=None,
    early_stop_return: float | None = None,
) -> tuple[DqnAgent, RunRecord]:
    """One-shot training run; returns the agent and its run record.

    The record logs (env step, trailing-100-episode mean return, optional eval
    score) every ``log_every`` steps. Identical (env state, config, seed) give
    bit-identical records and final parameters.
    """
    trainer = DqnTrainer(env, config, seed)
    trainer.run(total_steps, log_every, eval_fn, early_stop_return)
    return trainer.agent, trainer.record
