"""PPO with a clipped surrogate objective, GAE, and manual gradients.

Benchmark defaults: discount 0.99, minibatch 64, clip 0.2, entropy
coefficient 0.0. Rollout length, epoch count, GAE lambda and the value-loss
coefficient are not pinned by the benchmark protocol; the defaults here are
the customary ones and every one of them is a config field.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import NumericalFailure, TextEnv, derive_rng
from .mlp import AdamState, Mlp, adam_step
from .records import RunRecord


@dataclass
class PpoConfig:
    gamma: float = 0.99
    lam: float = 0.95
    clip: float = 0.2
    entropy_coef: float = 0.0
    value_coef: float = 0.5
    lr: float = 5e-4
    hidden: tuple[int, ...] = (100, 100)
    activation: str = "tanh"
    horizon: int = 1024
    epochs: int = 10
    minibatch_size: int = 64
    # with a zero entropy bonus a near-deterministic initial policy can lock
    # in early mistakes; a damped output head keeps it near-uniform at start
    policy_head_scale: float = 0.01
    extras: dict = field(default_factory=dict)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def gae(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    bootstrap_value: float,
    gamma: float,
    lam: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Generalized advantage estimates and returns for one rollout."""
    T = len(rewards)
    advantages = np.zeros(T)
    running = 0.0
    for t in range(T - 1, -1, -1):
        next_value = values[t + 1] if t + 1 < T else bootstrap_value
        nonterminal = 0.0 if dones[t] else 1.0
        delta = rewards[t] + gamma * next_value * nonterminal - values[t]
        running = delta + gamma * lam * nonterminal * running
        advantages[t] = running
    return advantages, advantages + values


@dataclass
class Rollout:
    obs: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    dones: np.ndarray
    log_probs: np.ndarray
    values: np.ndarray
    bootstrap_value: float


class PpoAgent:
    """Separate policy and value MLPs sharing the observation featurization."""

    def __init__(self, obs_dim: int, n_actions: int, config: PpoConfig, seed: int = 0):
        self.config = config
        self.policy = Mlp(
            [obs_dim, *config.hidden, n_actions],
            activation=config.activation,
            seed=derive_rng(seed, "ppo-policy-init"),
        )
        self.policy.weights[-1] *= config.policy_head_scale
        self.value = Mlp(
            [obs_dim, *config.hidden, 1],
            activation=config.activation,
            seed=derive_rng(seed, "ppo-value-init"),
        )
        self.policy_adam = AdamState.for_net(self.policy, config.lr)
        self.value_adam = AdamState.for_net(self.value, config.lr)

    def distribution(self, obs_vector: np.ndarray) -> np.ndarray:
        return softmax(self.policy.forward(obs_vector))

    def act(self, obs_vector: np.ndarray, rng: np.random.Generator) -> tuple[int, float, float]:
        """Sample an action; returns (action, log_prob, state value)."""
        probs = self.distribution(obs_vector)
        action = int(np.searchsorted(np.cumsum(probs), rng.random()))
        action = min(action, len(probs) - 1)
        value = float(self.value.forward(obs_vector)[0])
        return action, float(np.log(probs[action] + 1e-12)), value

    def act_greedy(self, obs_vector: np.ndarray) -> int:
        return int(np.argmax(self.policy.forward(obs_vector)))


def ppo_update(
    rollout: Rollout, agent: PpoAgent, rng: np.random.Generator
) -> dict[str, float]:
    """Several epochs of clipped-surrogate updates over shuffled minibatches.

    Advantages are normalized once per rollout batch (zero mean, unit std,
    1e-8 guard). Raises NumericalFailure if any loss term stops being finite.
    """
    config = agent.config
    advantages, returns = gae(
        rollout.rewards,
        rollout.values,
        rollout.dones,
        rollout.bootstrap_value,
        config.gamma,
        config.lam,
    )
    advantages = (advantages - advantages.mean()) / (advantages.std() + 1e-8)
    n = len(rollout.actions)
    diagnostics = {"policy_loss": 0.0, "value_loss": 0.0, "entropy": 0.0, "updates": 0.0}
    for _ in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.minibatch_size):
            ixs = order[start : start + config.minibatch_size]
            if len(ixs) == 0:
                continue
            mb_obs = rollout.obs[ixs]
            mb_actions = rollout.actions[ixs]
            mb_logp_old = rollout.log_probs[ixs]
            mb_adv = advantages[ixs]
            mb_returns = returns[ixs]
            m = len(ixs)

            logits = agent.policy.forward(mb_obs)
            probs = softmax(logits)
            picked = probs[np.arange(m), mb_actions]
            logp_new = np.log(picked + 1e-12)
            ratio = np.exp(logp_new - mb_logp_old)
            surr1 = ratio * mb_adv
            surr2 = np.clip(ratio, 1.0 - config.clip, 1.0 + config.clip) * mb_adv
            policy_loss = -np.minimum(surr1, surr2).mean()

            log_probs_all = np.log(probs + 1e-12)
            entropy = -(probs * log_probs_all).sum(axis=1)
            value_pred = agent.value.forward(mb_obs)[:, 0]
            value_err = value_pred - mb_returns
            value_loss = float(np.mean(value_err**2))
            total = policy_loss + config.value_coef * value_loss - config.entropy_coef * entropy.mean()
            if not np.isfinite(total):
                raise NumericalFailure(
                    f"non-finite PPO loss: policy={policy_loss}, value={value_loss}, "
                    f"entropy={entropy.mean()}, max|ratio|={np.abs(ratio).max()}"
                )

            # gradient of the clipped surrogate wrt logits: the ratio path is
            # live only where the unclipped branch attains the min
            flow = np.where(surr1 <= surr2, ratio * mb_adv, 0.0)
            onehot = np.zeros_like(probs)
            onehot[np.arange(m), mb_actions] = 1.0
            dlogits = -(flow[:, None] * (onehot - probs)) / m
            if config.entropy_coef != 0.0:
                dH = -probs * (log_probs_all + entropy[:, None])
                dlogits += -config.entropy_coef * dH / m
            adam_step(agent.policy, agent.policy.backward(mb_obs, dlogits), agent.policy_adam)

            dvalue = (config.value_coef * 2.0 * value_err / m)[:, None]
            adam_step(agent.value, agent.value.backward(mb_obs, dvalue), agent.value_adam)

            diagnostics["policy_loss"] += float(policy_loss)
            diagnostics["value_loss"] += value_loss
            diagnostics["entropy"] += float(entropy.mean())
            diagnostics["updates"] += 1.0
    for key in ("policy_loss", "value_loss", "entropy"):
        if diagnostics["updates"]:
            diagnostics[key] /= diagnostics["updates"]
    return diagnostics


class PpoTrainer:
    """Rollout-and-update loop that can be resumed in small budgets.

    The in-flight episode and both rng streams persist across ``run()``
    calls, so online mode drives one trainer in per-sample slices.
    """

    def __init__(self, env: TextEnv, config: PpoConfig, seed: int = 0):
        self.env = env
        self.config = config
        self.seed = seed
        self.agent = PpoAgent(env.observation_dim(), len(env.action_space), config, seed)
        self.action_rng = derive_rng(seed, "ppo-actions")
        self.shuffle_rng = derive_rng(seed, "ppo-shuffles")
        self.record = RunRecord(seed=seed)
        self.returns: list[float] = []
        self.step = 0
        self._obs = None
        self._episode_return = 0.0
        self._next_log = None

    def trailing_return(self) -> float:
        return float(np.mean(self.returns[-100:])) if self.returns else 0.0

    def run(
        self,
        steps: int,
        log_every: int | None = 1000,
        eval_fn=None,
        early_stop_return: float | None = None,
    ) -> None:
        """Advance training by ``steps`` env steps (rounded up to rollouts)."""
        if steps <= 0:
            return
        config = self.config
        if self._obs is None:
            self._obs = self.env.reset()
        if log_every and self._next_log is None:
            self._next_log = self.step + log_every
        until = self.step + steps
        while self.step < until:
            horizon = min(config.horizon, until - self.step)
            obs_buf = np.zeros((horizon, self.env.observation_dim()))
            act_buf = np.zeros(horizon, dtype=np.int64)
            rew_buf = np.zeros(horizon)
            done_buf = np.zeros(horizon, dtype=bool)
            logp_buf = np.zeros(horizon)
            val_buf = np.zeros(horizon)
            for t in range(horizon):
                action, logp, value = self.agent.act(self._obs.vector, self.action_rng)
                obs_buf[t] = self._obs.vector
                act_buf[t] = action
                logp_buf[t] = logp
                val_buf[t] = value
                next_obs, reward, done, _ = self.env.step(action)
                rew_buf[t] = reward
                done_buf[t] = done
                self._episode_return += reward
                self._obs = next_obs
                if done:
                    self.returns.append(self._episode_return)
                    self._episode_return = 0.0
                    self._obs = self.env.reset()
            bootstrap = 0.0 if done_buf[-1] else float(self.agent.value.forward(self._obs.vector)[0])
            rollout = Rollout(obs_buf, act_buf, rew_buf, done_buf, logp_buf, val_buf, bootstrap)
            ppo_update(rollout, self.agent, self.shuffle_rng)
            self.step += horizon

            if log_every and (self.step >= self._next_log or self.step >= until):
                trailing = self.trailing_return()
                score = eval_fn(self.agent) if eval_fn is not None else None
                self.record.log(self.step, trailing, score)
                self._next_log += log_every
                if (
                    early_stop_return is not None
                    and trailing >= early_stop_return
                    and len(self.returns) >= 100
                ):
                    return


def train_ppo(
    env: TextEnv,
    config: PpoConfig,
    total_steps: int,
    seed: int = 0,
    log_every: int = 1000,
    eval_fn=None,
    early_stop_return: float | None = None,
) -> tuple[PpoAgent, RunRecord]:
    """One-shot training run over fixed-horizon rollouts."""
    trainer = PpoTrainer(env, config, seed)
    trainer.run(total_steps, log_every, eval_fn, early_stop_return)
    return trainer.agent, trainer.record
