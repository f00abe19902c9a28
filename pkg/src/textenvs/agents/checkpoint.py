"""Versioned JSON checkpoints: network parameters, optimizer state, config echo.

JSON keeps checkpoints byte-deterministic (floats serialize via repr) and
diffable; nets are stored row-major as nested lists.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .dqn import DqnAgent, DqnConfig
from .mlp import AdamState, Mlp
from .ppo import PpoAgent, PpoConfig

FORMAT_VERSION = 1


def _net_to_dict(net: Mlp) -> dict:
    return {
        "layer_sizes": net.layer_sizes,
        "activation": net.activation,
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }


def _net_from_dict(obj: dict) -> Mlp:
    net = Mlp(obj["layer_sizes"], activation=obj["activation"])
    net.weights = [np.array(w) for w in obj["weights"]]
    net.biases = [np.array(b) for b in obj["biases"]]
    return net


def _adam_to_dict(state: AdamState) -> dict:
    return {
        "lr": state.lr,
        "beta1": state.beta1,
        "beta2": state.beta2,
        "eps": state.eps,
        "t": state.t,
        "m": [m.tolist() for m in state.m],
        "v": [v.tolist() for v in state.v],
    }


def _adam_from_dict(obj: dict) -> AdamState:
    return AdamState(
        lr=obj["lr"],
        beta1=obj["beta1"],
        beta2=obj["beta2"],
        eps=obj["eps"],
        t=obj["t"],
        m=[np.array(m) for m in obj["m"]],
        v=[np.array(v) for v in obj["v"]],
    )


@dataclass
class Checkpoint:
    kind: str  # "dqn" | "ppo"
    task: str
    seed: int
    config: dict[str, Any]
    nets: dict[str, dict]
    adam: dict[str, dict]

    @classmethod
    def from_dqn(cls, agent: DqnAgent, task: str, seed: int) -> "Checkpoint":
        return cls(
            kind="dqn",
            task=task,
            seed=seed,
            config=asdict(agent.config),
            nets={"online": _net_to_dict(agent.online), "target": _net_to_dict(agent.target)},
            adam={"online": _adam_to_dict(agent.adam)},
        )

    @classmethod
    def from_ppo(cls, agent: PpoAgent, task: str, seed: int) -> "Checkpoint":
        return cls(
            kind="ppo",
            task=task,
            seed=seed,
            config=asdict(agent.config),
            nets={"policy": _net_to_dict(agent.policy), "value": _net_to_dict(agent.value)},
            adam={
                "policy": _adam_to_dict(agent.policy_adam),
                "value": _adam_to_dict(agent.value_adam),
            },
        )

    def save(self, path: str | Path) -> None:
        payload = {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "task": self.task,
            "seed": self.seed,
            "config": self.config,
            "nets": self.nets,
            "adam": self.adam,
        }
        Path(path).write_text(
            json.dumps(payload, sort_keys=True, ensure_ascii=False), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "Checkpoint":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version {payload.get('format_version')}")
        return cls(
            kind=payload["kind"],
            task=payload["task"],
            seed=payload["seed"],
            config=payload["config"],
            nets=payload["nets"],
            adam=payload["adam"],
        )

    def policy_net(self) -> Mlp:
        """The net greedy evaluation should argmax over."""
        return _net_from_dict(self.nets["online" if self.kind == "dqn" else "policy"])

    def policy_fn(self):
        net = self.policy_net()
        return lambda obs_vector: int(np.argmax(net.forward(obs_vector)))

    def to_agent(self) -> DqnAgent | PpoAgent:
        """Rebuild a live agent (nets + optimizer moments) from the checkpoint."""
        config = dict(self.config)
        config["hidden"] = tuple(config["hidden"])
        if self.kind == "dqn":
            agent = DqnAgent.__new__(DqnAgent)
            agent.config = DqnConfig(**config)
            agent.online = _net_from_dict(self.nets["online"])
            agent.target = _net_from_dict(self.nets["target"])
            agent.adam = _adam_from_dict(self.adam["online"])
            return agent
        agent = PpoAgent.__new__(PpoAgent)
        agent.config = PpoConfig(**config)
        agent.policy = _net_from_dict(self.nets["policy"])
        agent.value = _net_from_dict(self.nets["value"])
        agent.policy_adam = _adam_from_dict(self.adam["policy"])
        agent.value_adam = _adam_from_dict(self.adam["value"])
        return agent
