"""Experiment orchestration: config parsing, seeding, trials and CSV output.

Config files are JSON.  Keys (defaults in brackets)::

    environment:                      required
        oracle         "linear" | "neural" | "tabular"
        context        "fixed" | "changing"            ["fixed"; linear only]
        d, m           dimension / arms per context    [linear: required; neural: m = all 2**14]
        normalize      project Gaussian arms to unit norm   [true]
        noise_std      Gaussian reward noise          [1.0 linear, 0.5 neural, 1.0 tabular]
        features       "linear" | "quadratic" | "onehot" | "onehot_quadratic" | "random_relu"   ["linear"]
        relu_features  k for random_relu              [250]
        path, feature_columns, value_column, standardize      tabular CSV source
        synthetic      {"m": .., "d": ..}             fabricated tabular data instead of a CSV
    total_queries     T * P budget                    required
    parallelism       list of P, each dividing total_queries   required
    algorithms        names or {"kind", "epsilon", "name"} objects   required
    trials            [1]
    seed              [0]
    output_dir        ["results"]
    scales            {"lambda", "R", "S", "L", "epsilon"}   [1, 1, 1, "auto", 0]
    delta             number or "1/T"                 ["1/T"]
    cci_constant      [2.0]
    dr_routine        "identity" | "random_explore"   ["identity"]
    grid              {"lambda": [..], "R": [..], "S": [..]}   optional cross-product
    rich              {"chi2", "pi_min2", "pi_max2"}  optional, for ``bounds``
    workers           [1]

Seeds: every random stream is derived by :func:`seed_stream` from the base
seed and a label tuple.  The environment of trial ``k`` uses
``("env", k)`` so all algorithms and parallelism levels face the same
instance; changing contexts use ``("contexts", k, P)``; reward noise and
policy randomness use ``("noise", alg, P, k)`` and ``("policy", alg, P, k)``.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .confidence import ProblemScales
from .environments import (
    FEATURE_SCHEMES,
    Environment,
    TabularParseError,
    load_tabular_csv,
    make_superconductor_like,
    random_relu_matrix,
)
from .metrics import (
    BoundInputs,
    RegretLedger,
    aggregate_trials,
    bound_doubling_arbitrary,
    bound_doubling_finite,
    burn_in_rich,
)
from .policies import DRRoutine, PolicyConfig, PolicyKind, initial_state, observe_batch, select_batch

__all__ = [
    "ConfigError",
    "AlgorithmSpec",
    "ExperimentConfig",
    "RunManifest",
    "parse_config",
    "resolve_config",
    "seed_stream",
    "stream_key",
    "build_environment",
    "run_trial",
    "run_experiment",
    "main",
    "LONG_HEADER",
    "AGGREGATE_HEADER",
]

LONG_HEADER = (
    "trial", "algorithm", "P", "t", "p", "arm_index", "reward",
    "inst_regret", "cum_parallel_regret", "is_doubling", "alpha_min",
)
AGGREGATE_HEADER = (
    "algorithm", "P", "total_queries_index", "mean_cum_regret",
    "std_cum_regret", "mean_best_value", "mean_alpha_min",
)

_TOP_KEYS = {
    "environment", "total_queries", "parallelism", "algorithms", "trials", "seed",
    "output_dir", "scales", "delta", "cci_constant", "dr_routine", "grid", "rich", "workers",
}
_ENV_KEYS = {
    "oracle", "context", "d", "m", "normalize", "noise_std", "features", "relu_features",
    "path", "feature_columns", "value_column", "standardize", "synthetic",
}
_SCALE_KEYS = {"lambda", "R", "S", "L", "epsilon"}
_GRID_KEYS = {"lambda", "R", "S"}
_RICH_KEYS = {"chi2", "pi_min2", "pi_max2"}


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the key path."""


# ---------------------------------------------------------------- seeding


def stream_key(base: int, labels) -> bytes:
    """32-byte BLAKE2b digest of the canonical encoding of ``(base, *labels)``.

    The encoding is ``json.dumps([base, *labels], separators=(",", ":"))``
    in UTF-8, so any implementation can recompute it.
    """
    payload = json.dumps([int(base), *labels], separators=(",", ":")).encode("utf-8")
    return hashlib.blake2b(payload, digest_size=32).digest()


def seed_stream(base: int, labels=()) -> np.random.Generator:
    """Independent random stream for ``(base, labels)``.

    The digest from :func:`stream_key` is split into a 128-bit key and a
    128-bit counter offset for numpy's counter-based Philox generator.
    """
    digest = stream_key(base, list(labels))
    key = int.from_bytes(digest[:16], "little")
    counter = int.from_bytes(digest[16:], "little")
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


# ---------------------------------------------------------------- config


@dataclass(frozen=True)
class AlgorithmSpec:
    kind: PolicyKind
    name: str
    epsilon: float = 0.1


@dataclass
class ExperimentConfig:
    environment: dict
    total_queries: int
    parallelism: list
    algorithms: list
    trials: int = 1
    seed: int = 0
    output_dir: str = "results"
    lam: float = 1.0
    R: float = 1.0
    S: float = 1.0
    L: float | str = "auto"
    eps: float = 0.0
    delta: float | str = "1/T"
    cci_constant: float = 2.0
    dr_routine: str = "identity"
    grid: dict | None = None
    rich: dict | None = None
    workers: int = 1

    def delta_for(self, T: int) -> float:
        if self.delta == "1/T":
            # keep delta inside (0, 1) when T == 1
            return 1.0 / T if T > 1 else 0.5
        return float(self.delta)

    def to_dict(self) -> dict:
        return {
            "environment": self.environment,
            "total_queries": self.total_queries,
            "parallelism": list(self.parallelism),
            "algorithms": [{"kind": a.kind.value, "name": a.name, "epsilon": a.epsilon} for a in self.algorithms],
            "trials": self.trials,
            "seed": self.seed,
            "output_dir": self.output_dir,
            "scales": {"lambda": self.lam, "R": self.R, "S": self.S, "L": self.L, "epsilon": self.eps},
            "delta": self.delta,
            "cci_constant": self.cci_constant,
            "dr_routine": self.dr_routine,
            "grid": self.grid,
            "rich": self.rich,
            "workers": self.workers,
        }


def _unknown(d: dict, allowed: set, path: str) -> None:
    extra = sorted(set(d) - allowed)
    if extra:
        raise ConfigError(f"unknown key {path}{extra[0]!r}" + (f" (and {len(extra) - 1} more)" if len(extra) > 1 else ""))


def _number(value, path, positive=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{path}: must be positive, got {value!r}")
    return int(value) if integer else float(value)


def _parse_algorithm(entry, i) -> AlgorithmSpec:
    path = f"algorithms[{i}]"
    if isinstance(entry, str):
        entry = {"kind": entry}
    if not isinstance(entry, dict):
        raise ConfigError(f"{path}: expected a name or an object")
    _unknown(entry, {"kind", "name", "epsilon"}, f"{path}.")
    if "kind" not in entry:
        raise ConfigError(f"{path}.kind: missing required key")
    try:
        kind = PolicyKind(entry["kind"])
    except ValueError:
        names = ", ".join(k.value for k in PolicyKind)
        raise ConfigError(f"{path}.kind: unknown algorithm {entry['kind']!r} (expected one of {names})") from None
    eps = _number(entry.get("epsilon", 0.1), f"{path}.epsilon")
    if not 0.0 <= eps <= 1.0:
        raise ConfigError(f"{path}.epsilon: must lie in [0, 1]")
    default = kind.value if kind is not PolicyKind.EPSILON_GREEDY else f"EpsilonGreedy[{eps:g}]"
    return AlgorithmSpec(kind, str(entry.get("name", default)), eps)


def resolve_config(raw: dict) -> ExperimentConfig:
    """Validate a config mapping and fill in defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    _unknown(raw, _TOP_KEYS, "")
    for key in ("environment", "total_queries", "parallelism", "algorithms"):
        if key not in raw:
            raise ConfigError(f"{key}: missing required key")

    env = raw["environment"]
    if not isinstance(env, dict):
        raise ConfigError("environment: expected an object")
    _unknown(env, _ENV_KEYS, "environment.")
    env = copy.deepcopy(env)
    oracle = env.get("oracle")
    if oracle not in ("linear", "neural", "tabular"):
        raise ConfigError(f"environment.oracle: expected 'linear', 'neural' or 'tabular', got {oracle!r}")
    features = env.setdefault("features", "linear")
    if features not in FEATURE_SCHEMES:
        raise ConfigError(f"environment.features: unknown scheme {features!r}")
    if oracle == "linear":
        for key in ("d", "m"):
            if key not in env:
                raise ConfigError(f"environment.{key}: missing required key")
            env[key] = _number(env[key], f"environment.{key}", positive=True, integer=True)
        env.setdefault("context", "fixed")
        if env["context"] not in ("fixed", "changing"):
            raise ConfigError(f"environment.context: expected 'fixed' or 'changing', got {env['context']!r}")
        if features != "linear":
            raise ConfigError("environment.features: the linear oracle uses linear features")
        env.setdefault("normalize", True)
        env.setdefault("noise_std", 1.0)
    elif oracle == "neural":
        env.setdefault("context", "fixed")
        if env["context"] != "fixed":
            raise ConfigError("environment.context: the neural oracle needs a fixed context")
        if env.get("m") is not None:
            env["m"] = _number(env["m"], "environment.m", positive=True, integer=True)
        env.setdefault("m", None)
        env.setdefault("noise_std", 0.5)
    else:
        env.setdefault("context", "fixed")
        if ("path" in env) == ("synthetic" in env):
            raise ConfigError("environment: tabular oracle needs exactly one of 'path' or 'synthetic'")
        if "synthetic" in env:
            syn = env["synthetic"]
            if not isinstance(syn, dict) or set(syn) != {"m", "d"}:
                raise ConfigError("environment.synthetic: expected {'m': .., 'd': ..}")
        env.setdefault("value_column", "value")
        env.setdefault("feature_columns", None)
        env.setdefault("standardize", False)
        env.setdefault("noise_std", 1.0)
    if features == "random_relu":
        env.setdefault("relu_features", 250)
    env["noise_std"] = _number(env["noise_std"], "environment.noise_std")

    tq = _number(raw["total_queries"], "total_queries", positive=True, integer=True)
    plist = raw["parallelism"]
    if not isinstance(plist, list) or not plist:
        raise ConfigError("parallelism: expected a non-empty list")
    plist = [_number(p, f"parallelism[{i}]", positive=True, integer=True) for i, p in enumerate(plist)]
    for i, P in enumerate(plist):
        if tq % P:
            raise ConfigError(f"parallelism[{i}]: total_queries={tq} is not divisible by P={P}")

    algs = raw["algorithms"]
    if not isinstance(algs, list) or not algs:
        raise ConfigError("algorithms: expected a non-empty list")
    algs = [_parse_algorithm(a, i) for i, a in enumerate(algs)]
    names = [a.name for a in algs]
    if len(set(names)) != len(names):
        raise ConfigError("algorithms: names must be unique")
    if env["oracle"] == "linear" and env["context"] == "changing":
        for i, a in enumerate(algs):
            if a.kind is PolicyKind.EPSILON_GREEDY:
                raise ConfigError(f"algorithms[{i}]: EpsilonGreedy needs a fixed global context")

    scales = raw.get("scales", {})
    if not isinstance(scales, dict):
        raise ConfigError("scales: expected an object")
    _unknown(scales, _SCALE_KEYS, "scales.")
    lam = _number(scales.get("lambda", 1.0), "scales.lambda", positive=True)
    R = _number(scales.get("R", 1.0), "scales.R")
    S = _number(scales.get("S", 1.0), "scales.S", positive=True)
    L = scales.get("L", "auto")
    if L != "auto":
        L = _number(L, "scales.L", positive=True)
    eps = _number(scales.get("epsilon", 0.0), "scales.epsilon")

    delta = raw.get("delta", "1/T")
    if delta != "1/T":
        delta = _number(delta, "delta")
        if not 0 < delta < 1:
            raise ConfigError("delta: must lie in (0, 1)")

    grid = raw.get("grid")
    if grid is not None:
        if not isinstance(grid, dict):
            raise ConfigError("grid: expected an object")
        _unknown(grid, _GRID_KEYS, "grid.")
        for k, v in grid.items():
            if not isinstance(v, list) or not v:
                raise ConfigError(f"grid.{k}: expected a non-empty list")
            for j, x in enumerate(v):
                _number(x, f"grid.{k}[{j}]", positive=(k != "R"))
    rich = raw.get("rich")
    if rich is not None:
        if not isinstance(rich, dict) or set(rich) != _RICH_KEYS:
            raise ConfigError("rich: expected exactly the keys chi2, pi_min2, pi_max2")
        for k, v in rich.items():
            _number(v, f"rich.{k}", positive=True)

    cci = _number(raw.get("cci_constant", 2.0), "cci_constant")
    if not cci > 1:
        raise ConfigError("cci_constant: must exceed 1")
    dr = raw.get("dr_routine", "identity")
    if dr not in ("identity", "random_explore"):
        raise ConfigError(f"dr_routine: expected 'identity' or 'random_explore', got {dr!r}")

    return ExperimentConfig(
        environment=env,
        total_queries=tq,
        parallelism=plist,
        algorithms=algs,
        trials=_number(raw.get("trials", 1), "trials", positive=True, integer=True),
        seed=_number(raw.get("seed", 0), "seed", integer=True),
        output_dir=str(raw.get("output_dir", "results")),
        lam=lam, R=R, S=S, L=L, eps=eps,
        delta=delta,
        cci_constant=cci,
        dr_routine=dr,
        grid=grid,
        rich=rich,
        workers=_number(raw.get("workers", 1), "workers", positive=True, integer=True),
    )


def parse_config(path) -> ExperimentConfig:
    """Load and validate a JSON config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return resolve_config(raw)


# ---------------------------------------------------------------- trials


def build_environment(cfg: ExperimentConfig, trial: int) -> Environment:
    env = cfg.environment
    rng = seed_stream(cfg.seed, ["env", trial])
    kind = env["oracle"]
    if kind == "linear":
        return Environment.linear(env["d"], env["m"], env["context"], rng, env["noise_std"], env["normalize"])
    if kind == "neural":
        if env["features"] == "random_relu":
            raise ConfigError("environment.features: random_relu is only wired up for tabular data")
        return Environment.neural(rng, env["features"], env["m"], env["noise_std"])
    if "synthetic" in env:
        oracle = make_superconductor_like(env["synthetic"]["m"], env["synthetic"]["d"], rng, env["noise_std"])
    else:
        try:
            oracle = load_tabular_csv(
                env["path"], env["feature_columns"], env["value_column"], env["noise_std"], env["standardize"]
            )
        except TabularParseError as exc:
            raise ConfigError(f"environment.path: {exc}") from exc
    weights = None
    if env["features"] == "random_relu":
        weights = random_relu_matrix(env["relu_features"], oracle.arms.shape[1], rng)
    return Environment.tabular(oracle, env["features"], weights)


def _max_arm_norm(environment: Environment) -> float:
    if environment.is_global:
        return float(np.linalg.norm(environment.global_context.features, axis=1).max())
    gen = environment.generator
    return 1.0 if gen.normalize else float("nan")


def _scales(cfg: ExperimentConfig, environment: Environment, T: int) -> ProblemScales:
    L = cfg.L
    if L == "auto":
        L = _max_arm_norm(environment)
        if not np.isfinite(L):
            # unnormalized Gaussian arms: a high quantile of the norm
            d = environment.generator.d
            L = math.sqrt(d) + 3.0
    return ProblemScales(R=cfg.R, S=cfg.S, L=max(L, 1e-12), lam=cfg.lam, eps=cfg.eps, delta=cfg.delta_for(T))


def _policy(cfg: ExperimentConfig, alg: AlgorithmSpec, scales: ProblemScales) -> PolicyConfig:
    return PolicyConfig(
        kind=alg.kind,
        scales=scales,
        dr_routine=DRRoutine(cfg.dr_routine),
        cci_constant=cfg.cci_constant,
        epsilon_greedy_rate=alg.epsilon,
    )


def run_trial(cfg: ExperimentConfig, alg: AlgorithmSpec, P: int, trial: int, environment=None) -> RegretLedger:
    """Run one ``(algorithm, P, trial)`` cell and return its ledger."""
    if environment is None:
        environment = build_environment(cfg, trial)
    T = cfg.total_queries // P
    policy = _policy(cfg, alg, _scales(cfg, environment, T))
    ctx_rng = seed_stream(cfg.seed, ["contexts", trial, P])
    noise_rng = seed_stream(cfg.seed, ["noise", alg.name, P, trial])
    policy_rng = seed_stream(cfg.seed, ["policy", alg.name, P, trial])

    if alg.kind is PolicyKind.EPSILON_GREEDY and not environment.is_global:
        raise ConfigError(f"{alg.name}: EpsilonGreedy needs a fixed global context")
    d = environment.global_context.features.shape[1] if environment.is_global else environment.generator.d
    n_arms = environment.global_context.features.shape[0] if (
        environment.is_global and alg.kind is PolicyKind.EPSILON_GREEDY
    ) else None
    state = initial_state(policy, d, P, n_arms)
    ledger = RegretLedger(T, P)
    for t in range(1, T + 1):
        ctxs = [environment.context(t, p, ctx_rng) for p in range(1, P + 1)]
        decision = select_batch(policy, state, [c.features for c in ctxs], policy_rng)
        idx = decision.arm_indices
        chosen = np.array([ctxs[p].values[idx[p]] for p in range(P)])
        regret = np.array([ctxs[p].best_value for p in range(P)]) - chosen
        rewards = np.array([environment.noisy(ctxs[p], idx[p], noise_rng) for p in range(P)])
        ledger.record(idx, rewards, regret, chosen, decision.is_doubling_round, decision.alpha_min)
        state = observe_batch(policy, state, decision, rewards)
    return ledger


def _run_cell(args):
    cfg, alg, P, trial = args
    start = time.perf_counter()
    ledger = run_trial(cfg, alg, P, trial)
    return ledger, time.perf_counter() - start


@dataclass
class RunManifest:
    config: dict
    seeds: list = field(default_factory=list)
    version: str = __version__
    wall_clock: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "seeds": self.seeds,
            "version": self.version,
            "wall_clock_seconds": self.wall_clock,
            "outputs": self.outputs,
        }


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_long(path, cells) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LONG_HEADER)
        for (alg, P, trial), ledger in cells:
            cum = ledger.cumulative_curve().reshape(ledger.T, ledger.P)
            for t in range(ledger.T):
                dbl = int(ledger.doubling[t])
                alpha = _fmt(ledger.alpha_min[t])
                for p in range(ledger.P):
                    w.writerow((
                        trial, alg.name, P, t + 1, p + 1, int(ledger.arm_indices[t, p]),
                        _fmt(ledger.rewards[t, p]), _fmt(ledger.inst_regret[t, p]),
                        _fmt(cum[t, p]), dbl, alpha,
                    ))


def _write_aggregate(path, cfg, cells) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_HEADER)
        for alg in cfg.algorithms:
            for P in cfg.parallelism:
                ledgers = [lg for (a, p, _), lg in cells if a.name == alg.name and p == P]
                agg = aggregate_trials(ledgers)
                for i in range(agg.mean_cum_regret.shape[0]):
                    w.writerow((
                        alg.name, P, i + 1, _fmt(agg.mean_cum_regret[i]), _fmt(agg.std_cum_regret[i]),
                        _fmt(agg.mean_best_value[i]), _fmt(agg.mean_alpha_min[i]),
                    ))


def _grid_cells(cfg: ExperimentConfig):
    if not cfg.grid:
        return [(cfg, None)]
    keys = sorted(cfg.grid)
    out = []
    for values in itertools.product(*(cfg.grid[k] for k in keys)):
        setting = dict(zip(keys, values))
        sub = replace(
            cfg,
            lam=float(setting.get("lambda", cfg.lam)),
            R=float(setting.get("R", cfg.R)),
            S=float(setting.get("S", cfg.S)),
            grid=None,
        )
        label = "_".join(f"{k}={setting[k]:g}" for k in keys)
        sub.output_dir = os.path.join(cfg.output_dir, label)
        out.append((sub, label))
    return out


def _run_single(cfg: ExperimentConfig) -> RunManifest:
    jobs = [(cfg, alg, P, trial) for alg in cfg.algorithms for P in cfg.parallelism for trial in range(cfg.trials)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_cell, jobs))
    else:
        results = [_run_cell(j) for j in jobs]
    cells = [((alg, P, trial), ledger) for (_, alg, P, trial), (ledger, _) in zip(jobs, results)]

    os.makedirs(cfg.output_dir, exist_ok=True)
    long_path = os.path.join(cfg.output_dir, "rounds.csv")
    agg_path = os.path.join(cfg.output_dir, "aggregate.csv")
    _write_long(long_path, cells)
    _write_aggregate(agg_path, cfg, cells)

    manifest = RunManifest(config=cfg.to_dict())
    for (_, alg, P, trial), (ledger, secs) in zip(jobs, results):
        labels = {
            "env": ["env", trial],
            "contexts": ["contexts", trial, P],
            "noise": ["noise", alg.name, P, trial],
            "policy": ["policy", alg.name, P, trial],
        }
        manifest.seeds.append({
            "algorithm": alg.name, "P": P, "trial": trial,
            "streams": {k: stream_key(cfg.seed, v).hex() for k, v in labels.items()},
        })
        manifest.wall_clock.append({"algorithm": alg.name, "P": P, "trial": trial, "seconds": secs})
    manifest.outputs = {"rounds": os.path.basename(long_path), "aggregate": os.path.basename(agg_path)}
    with open(os.path.join(cfg.output_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, indent=2)
    return manifest


def run_experiment(cfg: ExperimentConfig) -> list[RunManifest]:
    """Run every (grid cell, algorithm, P, trial) and write CSVs plus a manifest.

    Per output directory: ``rounds.csv`` (one row per query),
    ``aggregate.csv`` (mean/std curves over trials) and ``manifest.json``,
    written last.
    """
    return [_run_single(sub) for sub, _ in _grid_cells(cfg)]


def doubling_bounds(cfg: ExperimentConfig) -> list[dict]:
    """Theoretical doubling-round bounds for each parallelism level of ``cfg``."""
    environment = build_environment(cfg, 0)
    out = []
    for P in cfg.parallelism:
        T = cfg.total_queries // P
        scales = _scales(cfg, environment, T)
        d = environment.global_context.features.shape[1] if environment.is_global else environment.generator.d
        m = environment.global_context.features.shape[0] if environment.is_global else None
        rich = cfg.rich or {}
        inputs = BoundInputs(d, T, P, scales.L, scales.lam, m, rich.get("chi2"), rich.get("pi_min2"), rich.get("pi_max2"))
        out.append({
            "P": P,
            "T": T,
            "d": d,
            "L": scales.L,
            "lambda": scales.lam,
            "arbitrary_contexts": bound_doubling_arbitrary(inputs),
            "finite_context": bound_doubling_finite(m, P) if m is not None else None,
            "large_regularizer_lambda": P * scales.L**2,
            "rich_burn_in": burn_in_rich(inputs),
        })
    return out


# ---------------------------------------------------------------- CLI


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parbandit", description="Parallel linear bandit simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "execute an experiment"),
        ("validate", "parse and validate a config"),
        ("bounds", "print theoretical doubling-round bounds"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out-dir", default=None)
        p.add_argument("--workers", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out_dir is not None:
            cfg.output_dir = args.out_dir
        if args.workers is not None:
            if args.workers < 1:
                raise ConfigError("--workers: must be positive")
            cfg.workers = args.workers
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "validate":
            print(json.dumps(cfg.to_dict(), indent=2))
        elif args.command == "bounds":
            print(json.dumps(doubling_bounds(cfg), indent=2))
        else:
            manifests = run_experiment(cfg)
            for m in manifests:
                print(f"wrote {m.config['output_dir']}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def main_entry() -> None:
    sys.exit(main())
