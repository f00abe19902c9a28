"""Multi-label classification environment.

The agent grows a label sequence for a sentence, one INSERT per step, and
stops with TERM. Reward is set-F1 against the oracle labels (duplicates and
order never matter), dense or sparse. A step cap of |vocabulary| + 1 keeps
every episode finite while still letting an optimal policy emit every label
and then terminate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..core import (
    ActionSpace,
    EnvConfig,
    ObservationFeaturizer,
    RewardFunction,
    Sample,
    StepResult,
    TextEnv,
)
from ..featurize import EmbeddingStore, featurize_mlc, hash_store
from ..metrics import set_f1

TERM_ACTION = "TERM"


@dataclass
class MlcObservation:
    text: str
    emitted: tuple[str, ...]
    vector: np.ndarray


class MlcFeaturizer(ObservationFeaturizer):
    """Default featurizer: [pooled sentence][bag-of-words of emitted labels]."""

    def __init__(self, store: EmbeddingStore, labels: list[str]):
        self.store = store
        self.labels = list(labels)

    def observation_dim(self) -> int:
        return self.store.dimension + len(self.labels)

    def featurize(self, observation: MlcObservation) -> np.ndarray:
        return featurize_mlc(
            self.store, self.labels, observation.text, list(observation.emitted)
        ).values


class SetF1Reward(RewardFunction):
    """Set-F1 reward; dense pays the per-insert delta, sparse pays at the end."""

    def __init__(self, dense: bool = True):
        self.dense = dense

    def __call__(self, observation, action: str, targets: list[str]) -> float:
        emitted = list(observation.emitted)
        if action == TERM_ACTION:
            return 0.0 if self.dense else set_f1(targets, emitted).f1
        after = emitted + [action]
        if self.dense:
            return set_f1(targets, after).f1 - set_f1(targets, emitted).f1
        if observation.forces_done:
            return set_f1(targets, after).f1
        return 0.0


@dataclass
class _EpisodeView:
    emitted: tuple[str, ...]
    forces_done: bool


class MlcEnv(TextEnv):
    """INSERT/TERM label sequence MDP with F1-against-oracle reward."""

    def __init__(
        self,
        labels: list[str],
        featurizer: ObservationFeaturizer | None = None,
        reward_function: RewardFunction | None = None,
        config: EnvConfig | None = None,
    ):
        super().__init__(labels, config)
        self.labels = list(labels)
        self._space = ActionSpace(self.labels + [TERM_ACTION])
        self.featurizer = featurizer or MlcFeaturizer(hash_store(), self.labels)
        self.reward_function = reward_function or SetF1Reward(
            dense=self.config.reward_flavor == "dense"
        )
        self.max_steps = self.config.max_episode_steps or len(self.labels) + 1
        self.sample: Sample | None = None
        self.emitted: list[str] = []
        self.step_count = 0

    @property
    def action_space(self) -> ActionSpace:
        return self._space

    def observation_dim(self) -> int:
        return self.featurizer.observation_dim()

    def _observe(self) -> MlcObservation:
        obs = MlcObservation(
            text=self.sample.text(), emitted=tuple(self.emitted), vector=np.zeros(0)
        )
        obs.vector = self.featurizer.featurize(obs)
        return obs

    def _terminal_observation(self) -> MlcObservation:
        return MlcObservation(
            text=self.sample.text(),
            emitted=tuple(self.emitted),
            vector=np.zeros(self.observation_dim()),
        )

    def _reset_episode(self, sample: Sample) -> MlcObservation:
        self.sample = sample
        self.emitted = []
        self.step_count = 0
        self.featurizer.init_on_reset(sample.text())
        return self._observe()

    def _step_episode(self, action: int) -> StepResult:
        name = self._space.ix_to_action(action)
        self.step_count += 1
        forces_done = self.step_count >= self.max_steps
        view = _EpisodeView(tuple(self.emitted), forces_done)
        reward = self.reward_function(view, name, self.sample.oracle_label)
        if name == TERM_ACTION:
            return StepResult(self._terminal_observation(), float(reward), True, {})
        self.emitted.append(name)
        if forces_done:
            return StepResult(
                self._terminal_observation(), float(reward), True, {"step_cap": "true"}
            )
        return StepResult(self._observe(), float(reward), False, {})

    def transcript(self) -> dict:
        return {
            "text": self.sample.text(),
            "true_label": list(self.sample.oracle_label),
            "predicted_label": list(self.emitted),
            "total_reward": self.total_reward,
        }

    def render(self) -> None:
        print(json.dumps(self.transcript(), ensure_ascii=False, indent=2))
