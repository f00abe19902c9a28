"""Interactive RL environments for text tasks, with baseline DQN/PPO agents."""

from .core import (
    ActionSpace,
    DataPool,
    EnvConfig,
    QASample,
    Sample,
    StepResult,
    derive_rng,
)
from .envs import MlcEnv, QAEnv, SeqTagEnv

__version__ = "0.1.0"

__all__ = [
    "ActionSpace",
    "DataPool",
    "EnvConfig",
    "MlcEnv",
    "QAEnv",
    "QASample",
    "Sample",
    "SeqTagEnv",
    "StepResult",
    "derive_rng",
    "__version__",
]
