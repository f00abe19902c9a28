"""Greedy evaluation of a policy over a sample set, plus a random baseline."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..core import EmptyEvaluation, Sample, TextEnv, derive_rng
from ..envs import MlcEnv, QAEnv, SeqTagEnv
from ..metrics import accuracy, micro_set_f1, micro_token_f1

# a policy maps an observation vector to an action index
Policy = Callable[[np.ndarray], int]


class RandomPolicy:
    def __init__(self, n_actions: int, seed: int = 0):
        self.n_actions = n_actions
        self.rng = derive_rng(seed, "random-policy")

    def __call__(self, obs_vector: np.ndarray) -> int:
        return int(self.rng.integers(self.n_actions))


def play_episode(env: TextEnv, policy: Policy, sample: Sample | None = None) -> dict:
    """Run one full episode under ``policy`` and return the env transcript."""
    obs = env.reset(sample)
    while not env.done:
        obs, _, _, _ = env.step(policy(obs.vector))
    return env.transcript()


def metric_name_for(env: TextEnv) -> str:
    return "accuracy" if isinstance(env, QAEnv) else "micro_f1"


def evaluate(
    env: TextEnv, policy: Policy, samples: Sequence[Sample]
) -> tuple[float, list[dict]]:
    """Greedy rollouts over ``samples``; returns (task metric, transcripts).

    The metric is micro token-F1 for tagging, micro set-F1 for multi-label
    classification, and accuracy for QA.
    """
    if not samples:
        raise EmptyEvaluation("no samples to evaluate on")
    transcripts = [play_episode(env, policy, sample) for sample in samples]
    if isinstance(env, SeqTagEnv):
        pairs = [(t["true_label"], t["predicted_label"]) for t in transcripts]
        score = micro_token_f1(pairs).f1
    elif isinstance(env, MlcEnv):
        pairs = [(t["true_label"], t["predicted_label"]) for t in transcripts]
        score = micro_set_f1(pairs).f1
    else:
        score = accuracy([t["predicted_label"] == t["true_label"] for t in transcripts])
    return float(score), transcripts
