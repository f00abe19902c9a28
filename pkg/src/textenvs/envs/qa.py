"""Multiple-choice question answering environment.

Choices are presented one at a time. ANS ends the episode and the choice on
screen becomes the answer (reward 1.0 if it is the right one, else 0.0);
CONT moves to the next choice. Continuing past the last choice terminates
with reward 0.0, so episodes are always finite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..core import (
    ActionSpace,
    EnvConfig,
    InvalidSample,
    ObservationFeaturizer,
    QASample,
    Sample,
    StepResult,
    TextEnv,
)
from ..featurize import EmbeddingStore, featurize_qa_informed, featurize_qa_simple, hash_store

ANS_ACTION = "ANS"
CONT_ACTION = "CONT"
# the long spellings used in interactive transcripts map to the same indices
QA_ALIASES = {"ANSWER": ANS_ACTION, "CONTINUE": CONT_ACTION}


@dataclass
class QAObservation:
    question: str
    facts: list[str]
    choice_key: str
    choice_text: str
    step: int
    vector: np.ndarray


class QAFeaturizer(ObservationFeaturizer):
    """Simple (3d concatenation) or informed (2-D cosine) featurizer."""

    def __init__(self, store: EmbeddingStore, kind: str = "informed"):
        if kind not in ("simple", "informed"):
            raise ValueError(f"unknown QA featurizer {kind!r}")
        self.store = store
        self.kind = kind

    def observation_dim(self) -> int:
        return 2 if self.kind == "informed" else 3 * self.store.dimension

    def featurize(self, observation: QAObservation) -> np.ndarray:
        fn = featurize_qa_informed if self.kind == "informed" else featurize_qa_simple
        return fn(
            self.store, observation.question, observation.choice_text, observation.facts
        ).values


class QAEnv(TextEnv):
    """Sequential choice presentation with binary ANS/CONT actions."""

    def __init__(
        self,
        featurizer: ObservationFeaturizer | None = None,
        config: EnvConfig | None = None,
        shuffle_choices: bool = False,
    ):
        super().__init__([], config)
        self._space = ActionSpace([ANS_ACTION, CONT_ACTION], aliases=QA_ALIASES)
        self.featurizer = featurizer or QAFeaturizer(hash_store(), "informed")
        self.shuffle_choices = shuffle_choices
        self.sample: QASample | None = None
        self.choice_keys: list[str] = []
        self.cursor = 0
        self.selected_key: str | None = None

    def _pool_checks_labels(self) -> bool:
        return False

    @property
    def action_space(self) -> ActionSpace:
        return self._space

    def observation_dim(self) -> int:
        return self.featurizer.observation_dim()

    def _observe(self) -> QAObservation:
        key = self.choice_keys[self.cursor]
        obs = QAObservation(
            question=self.sample.question,
            facts=list(self.sample.facts),
            choice_key=key,
            choice_text=self.sample.choices[key],
            step=self.cursor,
            vector=np.zeros(0),
        )
        obs.vector = self.featurizer.featurize(obs)
        return obs

    def _terminal_observation(self) -> QAObservation:
        return QAObservation(
            question=self.sample.question,
            facts=list(self.sample.facts),
            choice_key="",
            choice_text="",
            step=self.cursor,
            vector=np.zeros(self.observation_dim()),
        )

    def _reset_episode(self, sample: Sample) -> QAObservation:
        if not isinstance(sample, QASample):
            raise InvalidSample(f"sample {sample.id} is not a QA sample")
        if len(sample.choices) < 2:
            raise InvalidSample(f"sample {sample.id} has fewer than 2 choices")
        self.sample = sample
        self.choice_keys = sample.choice_keys
        if self.shuffle_choices:
            self.choice_keys = [
                self.choice_keys[int(i)] for i in self._rng.permutation(len(self.choice_keys))
            ]
        self.cursor = 0
        self.selected_key = None
        self.featurizer.init_on_reset(sample.question)
        return self._observe()

    def _step_episode(self, action: int) -> StepResult:
        name = self._space.ix_to_action(action)
        if name == ANS_ACTION:
            self.selected_key = self.choice_keys[self.cursor]
            reward = 1.0 if self.selected_key == self.sample.answer_key else 0.0
            return StepResult(self._terminal_observation(), reward, True, {})
        self.cursor += 1
        if self.cursor == len(self.choice_keys):
            return StepResult(
                self._terminal_observation(), 0.0, True, {"ran_out_of_choices": "true"}
            )
        return StepResult(self._observe(), 0.0, False, {})

    def transcript(self) -> dict:
        return {
            "question": self.sample.question,
            "facts": list(self.sample.facts),
            "choices": dict(self.sample.choices),
            "true_label": self.sample.answer_key,
            "predicted_label": self.selected_key,
            "total_reward": self.total_reward,
        }

    def render(self) -> None:
        if self.done:
            print(json.dumps(self.transcript(), ensure_ascii=False, indent=2))
            return
        print(f"Step {self.cursor}")
        print(f"Question: {self.sample.question}")
        for fact in self.sample.facts:
            print(f"Fact: {fact}")
        key = self.choice_keys[self.cursor]
        print(f"Choice {key}: {self.sample.choices[key]}")
