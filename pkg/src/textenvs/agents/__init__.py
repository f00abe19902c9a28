from .checkpoint import Checkpoint
from .defaults import dqn_defaults, ppo_defaults
from .dqn import DqnAgent, DqnConfig, DqnTrainer, ReplayBuffer, dqn_target, train_dqn
from .evaluate import RandomPolicy, evaluate, metric_name_for, play_episode
from .mlp import AdamState, Mlp, adam_step
from .ppo import PpoAgent, PpoConfig, PpoTrainer, Rollout, gae, ppo_update, train_ppo
from .records import RunRecord

__all__ = [
    "AdamState",
    "Checkpoint",
    "DqnAgent",
    "DqnConfig",
    "DqnTrainer",
    "Mlp",
    "PpoAgent",
    "PpoConfig",
    "PpoTrainer",
    "RandomPolicy",
    "ReplayBuffer",
    "Rollout",
    "RunRecord",
    "adam_step",
    "dqn_defaults",
    "dqn_target",
    "evaluate",
    "gae",
    "metric_name_for",
    "play_episode",
    "ppo_defaults",
    "ppo_update",
    "train_dqn",
    "train_ppo",
]
