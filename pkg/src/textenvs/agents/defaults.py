"""Per-task hyperparameter defaults used throughout the benchmark harness.

Tagging nets are 2x100 with learning rate 5e-4 (both agents), QA nets 2x64
at 1e-4, multi-label nets 2x200 at 1e-3; discount is 0.99 everywhere.
"""

from __future__ import annotations

from .dqn import DqnConfig
from .ppo import PpoConfig

TASKS = ("seqtag", "mlc", "qa")
AGENTS = ("dqn", "ppo")

_WIDTHS = {"seqtag": (100, 100), "qa": (64, 64), "mlc": (200, 200)}
_LRS = {"seqtag": 5e-4, "qa": 1e-4, "mlc": 1e-3}


def dqn_defaults(task: str) -> DqnConfig:
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    return DqnConfig(lr=_LRS[task], hidden=_WIDTHS[task])


def ppo_defaults(task: str) -> PpoConfig:
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    return PpoConfig(lr=_LRS[task], hidden=_WIDTHS[task])
