"""Benchmark harness CLI.

Subcommands: ``train`` (multi-seed runs with learning-curve CSVs and
figures), ``eval`` (dev-based model selection, test report), ``play``
(render one episode), ``online`` (one-pass human-in-the-loop simulation),
``gen-synthetic`` (solvable desk-scale corpora), ``trace`` (record seeded
episode streams), and ``bridge-serve`` (line-JSON env server).

Configuration comes from a flat ``key = value`` file plus flags; flags win.
Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .agents import (
    Checkpoint,
    DqnTrainer,
    PpoTrainer,
    RandomPolicy,
    dqn_defaults,
    evaluate,
    metric_name_for,
    ppo_defaults,
)
from .agents.records import RunRecord
from .core import EnvConfig, TextEnv, TextEnvsError, derive_rng
from .datasets import CorpusSplit, SyntheticSpec, generate_synthetic, load_split, write_corpus_dir
from .envs import MlcEnv, QAEnv, SeqTagEnv
from .envs.mlc import MlcFeaturizer
from .envs.qa import QAFeaturizer
from .envs.seqtag import SeqTagFeaturizer
from .featurize import DEFAULT_DIM, hash_store, load_embeddings
from .metrics import set_f1, token_f1

TASKS = ("seqtag", "mlc", "qa")
AGENTS = ("dqn", "ppo")
REWARDS = ("dense", "sparse")
# file-backed featurizer spellings all mean "word vectors from --embeddings"
FEATURIZER_FILE_ALIASES = ("file", "fasttext-file", "bytepair-file")
FEATURIZERS = FEATURIZER_FILE_ALIASES + ("hash", "simple", "informed")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything a training run needs; round-trips through the config file."""

    task: str = "seqtag"
    agent: str = "ppo"
    corpus: str = ""
    eval_corpus: str | None = None
    out: str = "runs/latest"
    embeddings: str = "hash"
    featurizer: str | None = None  # default depends on task
    reward: str = "dense"
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    total_steps: int = 50_000
    log_every: int = 1000
    hash_dim: int = DEFAULT_DIM
    token_col: int = 0
    tag_col: int = 1
    shuffle_choices: bool = False
    # agent overrides; None means the per-task default
    lr: float | None = None
    gamma: float | None = None
    hidden: tuple[int, ...] | None = None
    horizon: int | None = None
    epochs: int | None = None
    batch_size: int | None = None

    def resolved_featurizer(self) -> str:
        if self.featurizer:
            return "file" if self.featurizer in FEATURIZER_FILE_ALIASES else self.featurizer
        if self.task == "qa":
            return "informed"
        return "hash" if self.embeddings == "hash" else "file"

    def validate(self) -> None:
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.agent not in AGENTS:
            raise ConfigError(f"agent must be one of {AGENTS}, got {self.agent!r}")
        if self.reward not in REWARDS:
            raise ConfigError(f"reward must be one of {REWARDS}, got {self.reward!r}")
        if self.featurizer is not None and self.featurizer not in FEATURIZERS:
            raise ConfigError(f"featurizer must be one of {FEATURIZERS}")
        kind = self.resolved_featurizer()
        if self.task == "qa" and kind not in ("simple", "informed"):
            raise ConfigError("QA runs need the simple or informed featurizer")
        if self.task != "qa" and kind in ("simple", "informed"):
            raise ConfigError(f"the {kind} featurizer applies to the qa task only")
        if kind == "file" and (self.embeddings == "hash" or not self.embeddings):
            raise ConfigError("file featurizer needs --embeddings pointing at a vector file")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if self.total_steps < 0:
            raise ConfigError("total_steps must be nonnegative")

    def to_config_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, tuple):
                value = ", ".join(str(v) for v in value)
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "RunConfig":
        config = cls()
        return config.updated(mapping)

    def updated(self, mapping: dict[str, str]) -> "RunConfig":
        kwargs = {}
        by_name = {f.name: f for f in fields(self)}
        for key, raw in mapping.items():
            name = key.replace("-", "_")
            if name not in by_name:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[name] = _coerce(name, raw)
        return replace(self, **kwargs)


_INT_TUPLES = ("seeds", "hidden")
_INTS = ("total_steps", "log_every", "hash_dim", "token_col", "tag_col",
         "horizon", "epochs", "batch_size")
_FLOATS = ("lr", "gamma")
_BOOLS = ("shuffle_choices",)


def _coerce(name: str, raw):
    if not isinstance(raw, str):
        return raw
    value = raw.strip()
    try:
        if name in _INT_TUPLES:
            return tuple(int(v) for v in value.split(",") if v.strip())
        if name in _INTS:
            return int(value)
        if name in _FLOATS:
            return float(value)
        if name in _BOOLS:
            return value.lower() in ("1", "true", "yes")
    except ValueError:
        raise ConfigError(f"bad value for {name!r}: {raw!r}") from None
    return value


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` lines; blank lines and #-comments ignored."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        mapping[key.strip()] = value.strip().strip('"')
    return mapping


# ---------------------------------------------------------------------------
# construction helpers
# ---------------------------------------------------------------------------

def build_store(config: RunConfig):
    if config.embeddings == "hash" or not config.embeddings:
        return hash_store(config.hash_dim)
    path = Path(config.embeddings)
    if not path.exists():
        raise ConfigError(f"embeddings file not found: {path}")
    with path.open("r", encoding="utf-8") as source:
        return load_embeddings(source)


def load_corpus(config: RunConfig, path: str | Path, name: str | None = None) -> CorpusSplit:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"corpus file not found: {path}")
    if config.task == "seqtag":
        with path.open("r", encoding="utf-8") as source:
            from .datasets import parse_conll_columns

            return parse_conll_columns(
                source, config.token_col, config.tag_col, name or path.stem
            )
    return load_split(config.task, path, name)


def build_env(config: RunConfig, labels: list[str], seed: int, store=None) -> TextEnv:
    store = store if store is not None else build_store(config)
    env_config = EnvConfig(reward_flavor=config.reward, seed=seed)
    kind = config.resolved_featurizer()
    if config.task == "seqtag":
        return SeqTagEnv(labels, SeqTagFeaturizer(store, labels), config=env_config)
    if config.task == "mlc":
        return MlcEnv(labels, MlcFeaturizer(store, labels), config=env_config)
    return QAEnv(
        QAFeaturizer(store, kind),
        config=env_config,
        shuffle_choices=config.shuffle_choices,
    )


def build_trainer(config: RunConfig, env: TextEnv, seed: int):
    if config.agent == "dqn":
        agent_config = dqn_defaults(config.task)
    else:
        agent_config = ppo_defaults(config.task)
    overrides = {
        "lr": config.lr,
        "gamma": config.gamma,
        "hidden": config.hidden,
        "batch_size": config.batch_size,
    }
    if config.agent == "ppo":
        overrides["horizon"] = config.horizon
        overrides["epochs"] = config.epochs
        overrides.pop("batch_size")
        if config.batch_size is not None:
            overrides["minibatch_size"] = config.batch_size
    for key, value in overrides.items():
        if value is not None:
            setattr(agent_config, key, value)
    trainer_cls = DqnTrainer if config.agent == "dqn" else PpoTrainer
    return trainer_cls(env, agent_config, seed)


def match_score(task: str, oracle: list[str], predicted, answer=None) -> float:
    if task == "seqtag":
        return token_f1(oracle, predicted).f1
    if task == "mlc":
        return set_f1(oracle, predicted).f1
    return 1.0 if predicted == answer else 0.0


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_train(config: RunConfig) -> int:
    config.validate()
    train_split = load_corpus(config, config.corpus)
    eval_split = (
        load_corpus(config, config.eval_corpus) if config.eval_corpus else None
    )
    store = build_store(config)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)

    records: dict[int, RunRecord] = {}
    for seed in config.seeds:
        env = build_env(config, train_split.labels, seed, store)
        for sample in train_split.samples:
            env.add_sample(sample)
        trainer = build_trainer(config, env, seed)
        eval_fn = None
        if eval_split is not None:
            eval_env = build_env(config, train_split.labels, seed, store)

            def eval_fn(agent, _env=eval_env):
                policy = agent.act if config.agent == "dqn" else agent.act_greedy
                score, _ = evaluate(_env, policy, eval_split.samples)
                return score

        try:
            trainer.run(config.total_steps, config.log_every, eval_fn)
        except TextEnvsError as exc:
            raise TextEnvsError(f"training failed on seed {seed}: {exc}") from exc
        trainer.record.save(out / f"run_seed{seed}.csv")
        records[seed] = trainer.record
        if config.agent == "dqn":
            checkpoint = Checkpoint.from_dqn(trainer.agent, config.task, seed)
        else:
            checkpoint = Checkpoint.from_ppo(trainer.agent, config.task, seed)
        checkpoint.save(out / f"checkpoint_seed{seed}.json")
        print(f"seed {seed}: trailing mean return {trainer.trailing_return():.4f}")

    mean_rows = average_curves(records)
    curve_csv = out / "curve_mean.csv"
    with curve_csv.open("w", encoding="utf-8") as sink:
        sink.write("step,mean,std\n")
        for step, mean, std in mean_rows:
            sink.write(f"{step},{mean!r},{std!r}\n")

    echo = {
        "version": __version__,
        "config": _config_payload(config),
        "labels": train_split.labels,
        "featurizer": config.resolved_featurizer(),
        "metric_name": "accuracy" if config.task == "qa" else "micro_f1",
    }
    (out / "config.json").write_text(json.dumps(echo, indent=2, sort_keys=True))

    from .plotting import save_learning_curves

    save_learning_curves(
        records, mean_rows, out / "curve.png",
        title=f"{config.task} / {config.agent} / {config.resolved_featurizer()}",
    )
    print(f"wrote {out}/run_seed*.csv, curve_mean.csv, curve.png, checkpoints")
    return 0


def _config_payload(config: RunConfig) -> dict:
    payload = asdict(config)
    payload["seeds"] = list(config.seeds)
    if config.hidden is not None:
        payload["hidden"] = list(config.hidden)
    return payload


def average_curves(records: dict[int, RunRecord]) -> list[tuple[int, float, float]]:
    """Mean and std of the per-seed mean returns on the common step grid."""
    if not records:
        return []
    grids = [[row[0] for row in r.rows] for r in records.values()]
    common_len = min(len(g) for g in grids)
    if common_len == 0:
        return []
    grid = grids[0][:common_len]
    rows = []
    for i, step in enumerate(grid):
        values = [r.rows[i][1] for r in records.values()]
        rows.append((step, float(np.mean(values)), float(np.std(values))))
    return rows


def config_from_run_dir(run_dir: Path) -> tuple[RunConfig, dict]:
    echo = json.loads((run_dir / "config.json").read_text(encoding="utf-8"))
    payload = dict(echo["config"])
    payload["seeds"] = tuple(payload["seeds"])
    if payload.get("hidden") is not None:
        payload["hidden"] = tuple(payload["hidden"])
    config = RunConfig(**payload)
    return config, echo


def cmd_eval(run_dir: str, dev_path: str, test_path: str) -> int:
    run = Path(run_dir)
    checkpoints = sorted(run.glob("checkpoint_seed*.json"))
    if not checkpoints:
        print(f"no checkpoints under {run}", file=sys.stderr)
        return 1
    config, echo = config_from_run_dir(run)
    labels = echo["labels"]
    store = build_store(config)
    dev = load_corpus(config, dev_path)
    test = load_corpus(config, test_path)

    dev_scores: dict[int, float] = {}
    policies = {}
    for path in checkpoints:
        checkpoint = Checkpoint.load(path)
        policy = checkpoint.policy_fn()
        env = build_env(config, labels, checkpoint.seed, store)
        score, _ = evaluate(env, policy, dev.samples)
        dev_scores[checkpoint.seed] = score
        policies[checkpoint.seed] = policy
        print(f"seed {checkpoint.seed}: dev score {score:.4f}")

    selected = min(
        dev_scores, key=lambda seed: (-dev_scores[seed], seed)
    )  # argmax; ties -> lowest seed
    env = build_env(config, labels, selected, store)
    test_score, transcripts = evaluate(env, policies[selected], test.samples)
    metric_name = metric_name_for(env)

    report = {
        "task": config.task,
        "agent": config.agent,
        "featurizer": echo["featurizer"],
        "dev_scores": {str(seed): score for seed, score in sorted(dev_scores.items())},
        "selected_seed": selected,
        "test_score": test_score,
        "metric_name": metric_name,
        "transcripts": transcripts,
    }
    (run / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True))
    with (run / "dev_scores.csv").open("w", encoding="utf-8") as sink:
        sink.write("seed,dev_score\n")
        for seed in sorted(dev_scores):
            sink.write(f"{seed},{dev_scores[seed]!r}\n")

    from .plotting import save_dev_scores

    save_dev_scores(dev_scores, run / "dev_scores.png", metric_name)
    print(f"selected seed {selected}; test {metric_name} = {test_score:.4f}")
    print(f"wrote {run}/report.json, dev_scores.csv, dev_scores.png")
    return 0


def cmd_play(config: RunConfig, policy_arg: str, seed: int) -> int:
    config.validate()
    split = load_corpus(config, config.corpus)
    env = build_env(config, split.labels, seed)
    for sample in split.samples:
        env.add_sample(sample)
    if policy_arg == "random":
        policy = RandomPolicy(len(env.action_space), seed)
    else:
        policy = Checkpoint.load(policy_arg).policy_fn()
    obs = env.reset()
    total = 0.0
    while not env.done:
        env.render()
        action = policy(obs.vector)
        print(f"Action: {env.action_space.ix_to_action(action)}")
        obs, reward, done, _ = env.step(action)
        total += reward
    env.render()
    print(f"Total reward: {total}")
    return 0


def cmd_online(config: RunConfig, budget: int, window: int = 50) -> int:
    config.validate()
    split = load_corpus(config, config.corpus)
    seed = config.seeds[0]
    store = build_store(config)
    env = build_env(config, split.labels, seed, store)
    predict_env = build_env(config, split.labels, seed, store)
    trainer = build_trainer(config, env, seed)
    total_budget = max(1, budget * len(split.samples))

    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    rows: list[tuple[int, float]] = []
    window_sum = 0.0

    for ix, sample in enumerate(split.samples):
        # predict with the current policy
        policy = trainer.agent.act if config.agent == "dqn" else trainer.agent.act_greedy
        obs = predict_env.reset(sample)
        predicted = []
        while not predict_env.done:
            action = policy(obs.vector)
            predicted.append(predict_env.action_space.ix_to_action(action))
            obs, _, _, _ = predict_env.step(action)

        # the oracle label plays the part of the annotator
        if config.task == "qa":
            score = match_score("qa", sample.oracle_label,
                                predict_env.selected_key, sample.answer_key)
        else:
            emitted = predicted if config.task == "seqtag" else [
                p for p in predicted if p in split.labels
            ]
            score = match_score(config.task, sample.oracle_label, emitted)
        window_sum += score

        # inject the sample, then train briefly on everything seen so far
        env.add_sample(sample)
        if budget > 0:
            if isinstance(trainer, DqnTrainer):
                trainer.run(budget, log_every=None, anneal_steps=total_budget)
            else:
                trainer.run(budget, log_every=None)

        if (ix + 1) % window == 0:
            running = window_sum / window
            rows.append((ix + 1, running))
            print(f"Running match score {running}")
            window_sum = 0.0

    log_path = out / "online_log.csv"
    with log_path.open("w", encoding="utf-8") as sink:
        sink.write("samples_seen,running_match_score\n")
        for seen, value in rows:
            sink.write(f"{seen},{value!r}\n")

    from .plotting import save_online_curve

    save_online_curve(rows, out / "online.png")
    print(f"wrote {log_path} and online.png")
    return 0


def cmd_gen_synthetic(args) -> int:
    spec = SyntheticSpec(
        task=args.task,
        seed=args.seed,
        counts=tuple(int(c) for c in args.counts.split(",")),
        vocab_size=args.vocab_size,
        num_labels=args.num_labels,
        num_choices=args.num_choices,
        num_topics=args.num_topics,
    )
    splits = generate_synthetic(spec)
    paths = write_corpus_dir(args.task, splits, args.out, embedding_dim=args.embedding_dim)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def cmd_trace(config: RunConfig, episodes: int, seed: int) -> int:
    """Emit a seeded random-policy episode stream as JSON lines."""
    config.validate()
    split = load_corpus(config, config.corpus)
    env = build_env(config, split.labels, seed)
    for sample in split.samples:
        env.add_sample(sample)
    rng = derive_rng(seed, "trace-actions")
    for _ in range(episodes):
        obs = env.reset()
        print(json.dumps({
            "event": "reset",
            "sample_id": env.sample.id,
            "observation": obs.vector.tolist(),
        }))
        while not env.done:
            action = env.action_space.sample(rng)
            obs, reward, done, info = env.step(action)
            print(json.dumps({
                "event": "step",
                "action": action,
                "observation": obs.vector.tolist(),
                "reward": reward,
                "done": done,
                "info": info,
            }))
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--task", choices=TASKS)
    parser.add_argument("--agent", choices=AGENTS)
    parser.add_argument("--corpus", help="training corpus path")
    parser.add_argument("--eval-corpus", help="dev corpus for periodic eval")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--embeddings", help="'hash' or a .vec embedding file")
    parser.add_argument("--featurizer", choices=FEATURIZERS)
    parser.add_argument("--reward", choices=REWARDS)
    parser.add_argument("--seeds", help="comma-separated seed list")
    parser.add_argument("--total-steps", type=int, dest="total_steps")
    parser.add_argument("--log-every", type=int, dest="log_every")
    parser.add_argument("--hash-dim", type=int, dest="hash_dim")
    parser.add_argument("--token-col", type=int, dest="token_col")
    parser.add_argument("--tag-col", type=int, dest="tag_col")
    parser.add_argument("--lr", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--hidden", help="comma-separated hidden sizes")
    parser.add_argument("--horizon", type=int)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--batch-size", type=int, dest="batch_size")
    parser.add_argument("--shuffle-choices", action="store_true", dest="shuffle_choices",
                        default=None)


def _run_config_from_args(args) -> RunConfig:
    config = RunConfig()
    if args.config:
        config = config.updated(parse_config_file(args.config))
    overrides = {}
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = value
    return config.updated(overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="textenvs",
        description="Interactive text-task environments with baseline DQN/PPO agents",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="multi-seed training with learning curves")
    _add_run_options(p_train)

    p_eval = sub.add_parser("eval", help="dev-based model selection + test report")
    p_eval.add_argument("--run-dir", required=True)
    p_eval.add_argument("--dev", required=True)
    p_eval.add_argument("--test", required=True)

    p_play = sub.add_parser("play", help="render one episode")
    _add_run_options(p_play)
    p_play.add_argument("--policy", default="random",
                        help="'random' or a checkpoint path")
    p_play.add_argument("--seed", type=int, default=0)

    p_online = sub.add_parser("online", help="one-pass online learning loop")
    _add_run_options(p_online)
    p_online.add_argument("--budget", type=int, default=100,
                          help="training steps after each injected sample")

    p_gen = sub.add_parser("gen-synthetic", help="generate a solvable synthetic corpus")
    p_gen.add_argument("--task", choices=TASKS, required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--counts", default="500,100,100")
    p_gen.add_argument("--vocab-size", type=int, default=100, dest="vocab_size")
    p_gen.add_argument("--num-labels", type=int, default=3, dest="num_labels")
    p_gen.add_argument("--num-choices", type=int, default=3, dest="num_choices")
    p_gen.add_argument("--num-topics", type=int, default=4, dest="num_topics")
    p_gen.add_argument("--embedding-dim", type=int, default=DEFAULT_DIM, dest="embedding_dim")

    p_trace = sub.add_parser("trace", help="record seeded random episodes as JSON lines")
    _add_run_options(p_trace)
    p_trace.add_argument("--episodes", type=int, default=10)
    p_trace.add_argument("--seed", type=int, default=0)

    sub.add_parser("bridge-serve", help="serve environments over line-JSON stdio")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "train":
            return cmd_train(_run_config_from_args(args))
        if args.command == "eval":
            return cmd_eval(args.run_dir, args.dev, args.test)
        if args.command == "play":
            return cmd_play(_run_config_from_args(args), args.policy, args.seed)
        if args.command == "online":
            return cmd_online(_run_config_from_args(args), args.budget)
        if args.command == "gen-synthetic":
            return cmd_gen_synthetic(args)
        if args.command == "trace":
            return cmd_trace(_run_config_from_args(args), args.episodes, args.seed)
        if args.command == "bridge-serve":
            from .bridge import serve

            serve(sys.stdin, sys.stdout)
            return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TextEnvsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
