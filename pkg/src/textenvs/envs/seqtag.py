"""Sequence tagging environment: label a sentence left to right, one word per step.

The agent sees only the current word and its own previous label (partially
observable by design). Each action tags the current word; dense reward is the
step delta of prefix token-F1, sparse reward arrives once at episode end.
Either way the episode total equals the token-F1 of the finished sequence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..core import (
    ActionSpace,
    EmptySample,
    EnvConfig,
    ObservationFeaturizer,
    RewardFunction,
    Sample,
    StepResult,
    TextEnv,
)
from ..featurize import START_LABEL, EmbeddingStore, featurize_seqtag, hash_store
from ..metrics import token_f1


@dataclass
class SeqTagObservation:
    """Current word plus previous predicted label, and its feature vector."""

    word: str
    prev_label: str
    position: int
    vector: np.ndarray


class SeqTagFeaturizer(ObservationFeaturizer):
    """Default featurizer: [word embedding][previous-label one-hot]."""

    def __init__(self, store: EmbeddingStore, labels: list[str]):
        self.store = store
        self.labels = list(labels)

    def observation_dim(self) -> int:
        return self.store.dimension + len(self.labels) + 1

    def featurize(self, observation: SeqTagObservation) -> np.ndarray:
        return featurize_seqtag(
            self.store, self.labels, observation.word, observation.prev_label
        ).values


class TokenF1Reward(RewardFunction):
    """Prefix token-F1 reward, dense (per-step delta) or sparse (terminal)."""

    def __init__(self, dense: bool = True):
        self.dense = dense

    def __call__(self, observation, action: str, targets: list[str]) -> float:
        predicted = list(observation.predicted) + [action]
        t = len(predicted)
        if self.dense:
            prev = token_f1(targets[: t - 1], predicted[:-1]).f1
            return token_f1(targets[:t], predicted).f1 - prev
        if t == len(targets):
            return token_f1(targets, predicted).f1
        return 0.0


@dataclass
class _EpisodeView:
    """What reward functions get to see: the sequence built so far."""

    predicted: tuple[str, ...]
    position: int


class SeqTagEnv(TextEnv):
    """Word-by-word tagging MDP over a weighted sample pool.

    Actions are the label strings themselves, so
    ``action_space.ix_to_action(a)`` is directly comparable to oracle labels.
    """

    def __init__(
        self,
        labels: list[str],
        featurizer: ObservationFeaturizer | None = None,
        reward_function: RewardFunction | None = None,
        config: EnvConfig | None = None,
    ):
        super().__init__(labels, config)
        self.labels = list(labels)
        self._space = ActionSpace(self.labels)
        self.featurizer = featurizer or SeqTagFeaturizer(hash_store(), self.labels)
        self.reward_function = reward_function or TokenF1Reward(
            dense=self.config.reward_flavor == "dense"
        )
        self.sample: Sample | None = None
        self.cursor = 0
        self.predicted: list[str] = []

    @property
    def action_space(self) -> ActionSpace:
        return self._space

    def observation_dim(self) -> int:
        return self.featurizer.observation_dim()

    def _observe(self) -> SeqTagObservation:
        prev = self.predicted[-1] if self.predicted else START_LABEL
        obs = SeqTagObservation(
            word=self.sample.tokens()[self.cursor],
            prev_label=prev,
            position=self.cursor,
            vector=np.zeros(self.observation_dim()),
        )
        obs.vector = self.featurizer.featurize(obs)
        return obs

    def _terminal_observation(self) -> SeqTagObservation:
        return SeqTagObservation(
            word="",
            prev_label=self.predicted[-1] if self.predicted else START_LABEL,
            position=self.cursor,
            vector=np.zeros(self.observation_dim()),
        )

    def _reset_episode(self, sample: Sample) -> SeqTagObservation:
        if len(sample.tokens()) == 0:
            raise EmptySample(f"sample {sample.id} has no tokens")
        self.sample = sample
        self.cursor = 0
        self.predicted = []
        self.featurizer.init_on_reset(sample.tokens())
        return self._observe()

    def _step_episode(self, action: int) -> StepResult:
        label = self._space.ix_to_action(action)
        view = _EpisodeView(tuple(self.predicted), self.cursor)
        reward = self.reward_function(view, label, self.sample.oracle_label)
        self.predicted.append(label)
        self.cursor += 1
        done = self.cursor == len(self.sample.tokens())
        obs = self._terminal_observation() if done else self._observe()
        return StepResult(obs, float(reward), done, {})

    def transcript(self) -> dict:
        return {
            "text": self.sample.text(),
            "true_label": list(self.sample.oracle_label),
            "predicted_label": list(self.predicted),
            "total_reward": self.total_reward,
        }

    def render(self) -> None:
        print(json.dumps(self.transcript(), ensure_ascii=False, indent=2))
