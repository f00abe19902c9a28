"""Line-delimited JSON environment server for foreign-language clients.

One request object per line on stdin, one response per line on stdout.
Requests carry an ``op`` of make, reset, step, or close; step responses
mirror the (observation, reward, done, info) step contract. Errors come
back as ``{"ok": false, "kind": ..., "error": ...}`` and never kill the
server. Sessions are independent environments addressed by id.
"""

from __future__ import annotations

import json
from typing import IO

from .core import TextEnvsError


class _Session:
    def __init__(self, env):
        self.env = env


def _make(request: dict) -> tuple:
    from .cli import RunConfig, build_env, load_corpus

    known = {
        "task", "corpus", "featurizer", "reward", "embeddings", "hash_dim",
        "token_col", "tag_col", "shuffle_choices",
    }
    payload = {k: v for k, v in request.items() if k in known}
    config = RunConfig().updated({k: str(v) for k, v in payload.items()})
    config.validate()
    split = load_corpus(config, config.corpus)
    seed = int(request.get("seed", 0))
    env = build_env(config, split.labels, seed)
    for sample in split.samples:
        env.add_sample(sample)
    return env, split


def serve(source: IO[str], sink: IO[str]) -> None:
    sessions: dict[str, _Session] = {}
    counter = 0

    def reply(obj: dict) -> None:
        sink.write(json.dumps(obj) + "\n")
        sink.flush()

    for line in source:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            reply({"ok": False, "kind": "ParseError", "error": str(exc)})
            continue
        op = request.get("op")
        try:
            if op == "make":
                env, split = _make(request)
                session_id = f"s{counter}"
                counter += 1
                sessions[session_id] = _Session(env)
                reply({
                    "ok": True,
                    "session": session_id,
                    "actions": env.action_space.actions,
                    "observation_dim": env.observation_dim(),
                    "num_samples": len(split.samples),
                })
            elif op in ("reset", "step", "close", "render"):
                session_id = request.get("session")
                session = sessions.get(session_id)
                if session is None:
                    reply({"ok": False, "kind": "UnknownSession",
                           "error": f"no session {session_id!r}"})
                    continue
                if op == "reset":
                    obs = session.env.reset()
                    reply({
                        "ok": True,
                        "observation": obs.vector.tolist(),
                        "sample_id": session.env.sample.id,
                        "done": False,
                    })
                elif op == "step":
                    action = request.get("action")
                    if not isinstance(action, int):
                        raise TextEnvsError(f"action must be an integer, got {action!r}")
                    obs, reward, done, info = session.env.step(action)
                    reply({
                        "ok": True,
                        "observation": obs.vector.tolist(),
                        "reward": reward,
                        "done": done,
                        "info": info,
                    })
                elif op == "render":
                    transcript = session.env.transcript() if session.env.done else None
                    reply({"ok": True, "transcript": transcript})
                else:
                    del sessions[session_id]
                    reply({"ok": True})
            elif op == "shutdown":
                reply({"ok": True})
                return
            else:
                reply({"ok": False, "kind": "UnknownOp", "error": f"unknown op {op!r}"})
        except (TextEnvsError, ValueError, OSError) as exc:
            reply({"ok": False, "kind": type(exc).__name__, "error": str(exc)})
