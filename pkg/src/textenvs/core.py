"""Shared environment contract: samples, action spaces, data pools, rng streams.

Every task environment builds on the pieces here. Episodes follow the usual
gym convention (``reset()`` returns an observation, ``step()`` returns a
:class:`StepResult` that unpacks as ``obs, reward, done, info``).
"""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Iterator, NamedTuple, Sequence

import numpy as np


class TextEnvsError(Exception):
    """Base class for all library errors."""


class UnknownAction(TextEnvsError):
    pass


class UnknownLabel(TextEnvsError):
    pass


class VocabularyViolation(TextEnvsError):
    pass


class InvalidWeight(TextEnvsError):
    pass


class EmptyPool(TextEnvsError):
    pass


class FrozenPool(TextEnvsError):
    pass


class EpisodeFinished(TextEnvsError):
    pass


class EmptySample(TextEnvsError):
    pass


class InvalidSample(TextEnvsError):
    pass


class EmptyEvaluation(TextEnvsError):
    pass


class DimensionMismatch(TextEnvsError):
    pass


class NumericalFailure(TextEnvsError):
    pass


class ParseError(TextEnvsError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class SchemaError(ParseError):
    pass


def derive_rng(seed: int, *stream: str | int) -> np.random.Generator:
    """Return an independent generator for ``stream``, derived from the run seed.

    Each distinct ``(seed, stream)`` pair gives a reproducible, statistically
    independent stream, so environments, agents and shuffles never share state.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for part in stream:
        digest = hashlib.sha256(str(part).encode("utf-8")).digest()
        entropy.append(int.from_bytes(digest[:8], "little"))
    return np.random.default_rng(entropy)


@dataclass
class Sample:
    """One annotated data point.

    ``input_text`` is a token list for tagging tasks and a raw sentence for
    classification; ``oracle_label`` is the ordered list of true labels.
    """

    id: str
    input_text: list[str] | str
    oracle_label: list[str]

    def tokens(self) -> list[str]:
        if isinstance(self.input_text, str):
            raise TypeError(f"sample {self.id} holds a raw sentence, not tokens")
        return list(self.input_text)

    def text(self) -> str:
        if isinstance(self.input_text, str):
            return self.input_text
        return " ".join(self.input_text)


@dataclass
class QASample(Sample):
    """Multiple-choice question: question text, supporting facts, ordered choices."""

    question: str = ""
    facts: list[str] = field(default_factory=list)
    choices: dict[str, str] = field(default_factory=dict)
    answer_key: str = ""

    def __post_init__(self):
        if self.answer_key and self.answer_key not in self.choices:
            raise InvalidSample(
                f"sample {self.id}: answer key {self.answer_key!r} not among choices"
            )

    @property
    def choice_keys(self) -> list[str]:
        return list(self.choices.keys())


class ActionSpace:
    """Ordered set of action strings with a stable index <-> string bijection.

    Optional ``aliases`` map alternative spellings onto canonical actions
    (e.g. ANSWER -> ANS); ``ix_to_action`` always returns the canonical name.
    """

    def __init__(self, actions: Sequence[str], aliases: dict[str, str] | None = None):
        self._actions = list(actions)
        if len(set(self._actions)) != len(self._actions):
            raise ValueError("duplicate action strings")
        self._ix = {a: i for i, a in enumerate(self._actions)}
        self._aliases = dict(aliases or {})
        for alias, target in self._aliases.items():
            if target not in self._ix:
                raise ValueError(f"alias {alias!r} points at unknown action {target!r}")

    @property
    def actions(self) -> list[str]:
        return list(self._actions)

    def __len__(self) -> int:
        return len(self._actions)

    def __contains__(self, action: str) -> bool:
        return action in self._ix or action in self._aliases

    def action_to_ix(self, action: str) -> int:
        if action in self._ix:
            return self._ix[action]
        if action in self._aliases:
            return self._ix[self._aliases[action]]
        raise UnknownAction(f"{action!r} not in action space {self._actions}")

    def ix_to_action(self, ix: int) -> str:
        if not 0 <= ix < len(self._actions):
            raise UnknownAction(f"action index {ix} out of range 0..{len(self._actions) - 1}")
        return self._actions[ix]

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(len(self._actions)))


class DataPool:
    """Weighted pool of samples from which episodes are drawn.

    Weights are relative draw probabilities at reset (default 1.0). Pools are
    append-only; ``snapshot()`` returns a frozen copy safe to share across
    environment instances.
    """

    def __init__(self, labels: Sequence[str], check_labels: bool = True):
        self.labels = list(labels)
        self._label_set = set(self.labels)
        self._entries: list[tuple[Sample, float]] = []
        self._ids: set[str] = set()
        self._frozen = False
        self._check_labels = check_labels

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[tuple[Sample, float]]:
        return iter(self._entries)

    def add_sample(self, sample: Sample, weight: float = 1.0) -> None:
        if self._frozen:
            raise FrozenPool("pool snapshot is read-only")
        if weight < 0:
            raise InvalidWeight(f"negative weight {weight} for sample {sample.id}")
        if self._check_labels:
            bad = [l for l in sample.oracle_label if l not in self._label_set]
            if bad:
                raise VocabularyViolation(
                    f"sample {sample.id} labels {bad} not in vocabulary"
                )
        if sample.id in self._ids:
            raise ValueError(f"duplicate sample id {sample.id!r}")
        self._ids.add(sample.id)
        self._entries.append((sample, float(weight)))

    def draw(self, rng: np.random.Generator) -> Sample:
        """Draw one sample with probability proportional to its weight."""
        if not self._entries:
            raise EmptyPool("no samples in pool")
        weights = np.array([w for _, w in self._entries], dtype=float)
        total = weights.sum()
        if total <= 0:
            raise EmptyPool("all sample weights are zero")
        ix = int(rng.choice(len(self._entries), p=weights / total))
        return self._entries[ix][0]

    def snapshot(self) -> "DataPool":
        pool = DataPool(self.labels, check_labels=self._check_labels)
        pool._entries = list(self._entries)
        pool._ids = set(self._ids)
        pool._frozen = True
        return pool


class StepResult(NamedTuple):
    """What ``step()`` returns; unpacks as ``obs, reward, done, info``."""

    observation: Any
    reward: float
    done: bool
    info: dict[str, str]


@dataclass
class EnvConfig:
    """Common environment knobs shared by all tasks."""

    reward_flavor: str = "dense"  # "dense" | "sparse"
    max_episode_steps: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.reward_flavor not in ("dense", "sparse"):
            raise ValueError(f"reward_flavor must be dense or sparse, got {self.reward_flavor!r}")


class RewardFunction(ABC):
    """Extension point: maps (observation, action, targets) to a scalar reward."""

    @abstractmethod
    def __call__(self, observation: Any, action: str, targets: list[str]) -> float:
        raise NotImplementedError


class ObservationFeaturizer(ABC):
    """Extension point: turns a task observation into a fixed-length vector."""

    @abstractmethod
    def featurize(self, observation: Any) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def observation_dim(self) -> int:
        raise NotImplementedError

    def init_on_reset(self, input_text: list[str] | str) -> None:
        """Called by the environment at reset with the episode's input."""


class TextEnv(ABC):
    """Base class for the task environments.

    Subclasses implement ``_reset_episode`` / ``_step_episode`` and keep all
    mutable episode state on themselves; instances are single-threaded.
    """

    def __init__(self, labels: Sequence[str], config: EnvConfig | None = None):
        self.config = config or EnvConfig()
        self.pool = DataPool(labels, check_labels=self._pool_checks_labels())
        self._rng = derive_rng(self.config.seed, "env-draws")
        self._done = True
        self.total_reward = 0.0

    def _pool_checks_labels(self) -> bool:
        return True

    @property
    @abstractmethod
    def action_space(self) -> ActionSpace:
        raise NotImplementedError

    @abstractmethod
    def observation_dim(self) -> int:
        raise NotImplementedError

    def add_sample(self, sample: Sample, weight: float = 1.0) -> None:
        self.pool.add_sample(sample, weight)

    def reset(self, sample: Sample | None = None):
        """Start a fresh episode on ``sample`` (or one drawn from the pool)."""
        if sample is None:
            sample = self.pool.draw(self._rng)
        self._done = False
        self.total_reward = 0.0
        return self._reset_episode(sample)

    def step(self, action: int) -> StepResult:
        if self._done:
            raise EpisodeFinished("episode is done; call reset()")
        result = self._step_episode(action)
        self._done = result.done
        self.total_reward += result.reward
        return result

    @property
    def done(self) -> bool:
        return self._done

    @abstractmethod
    def _reset_episode(self, sample: Sample):
        raise NotImplementedError

    @abstractmethod
    def _step_episode(self, action: int) -> StepResult:
        raise NotImplementedError

    @abstractmethod
    def render(self) -> None:
        raise NotImplementedError
