"""Reward oracles, context generators, feature maps and tabular data loading.

An oracle evaluates a noiseless reward ``f`` and adds Gaussian noise drawn
from the caller's stream.  Policies only ever see the noisy reward; the
noiseless path exists for regret accounting.
"""

from __future__ import annotations

import csv
import enum
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "LinearOracle",
    "NeuralOracle",
    "TabularOracle",
    "ContextMode",
    "ContextGenerator",
    "Context",
    "Environment",
    "TabularParseError",
    "gen_context",
    "reward",
    "nn_forward",
    "expand_features",
    "random_relu_matrix",
    "all_binary_strings",
    "random_unit_theta",
    "load_tabular_csv",
    "write_tabular_csv",
    "make_superconductor_like",
    "NN_LAYER_SIZES",
    "FEATURE_SCHEMES",
]

NN_LAYER_SIZES = (14, 128, 256, 512, 1)
FEATURE_SCHEMES = ("linear", "quadratic", "onehot", "onehot_quadratic", "random_relu")


class TabularParseError(ValueError):
    """A CSV file could not be turned into a tabular oracle."""


@dataclass(frozen=True)
class LinearOracle:
    """``f(x) = x^T theta_star`` with Gaussian noise."""

    theta_star: np.ndarray
    noise_std: float = 1.0
    S: float | None = None

    def __post_init__(self):
        theta = np.asarray(self.theta_star, dtype=float)
        object.__setattr__(self, "theta_star", theta)
        if self.S is not None and np.linalg.norm(theta) > self.S * (1 + 1e-12):
            raise ValueError(f"||theta_star|| = {np.linalg.norm(theta):.4g} exceeds S = {self.S}")
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")

    def mean(self, x) -> float | np.ndarray:
        return np.asarray(x, dtype=float) @ self.theta_star


@dataclass(frozen=True)
class NeuralOracle:
    """Fixed random feed-forward network, ReLU on hidden layers, linear output.

    ``weights[i]`` has shape ``(h_{i+1}, h_i)``; there are no biases.  An
    optional affine map ``scale * f + shift`` is applied to the output.
    """

    weights: tuple
    noise_std: float = 0.5
    scale: float = 1.0
    shift: float = 0.0

    @classmethod
    def xavier(
        cls,
        rng: np.random.Generator,
        layer_sizes: Sequence[int] = NN_LAYER_SIZES,
        noise_std: float = 0.5,
    ) -> "NeuralOracle":
        """Draw every weight i.i.d. uniform on ``+-sqrt(6 / (h_i + h_{i+1}))``."""
        weights = []
        for h_in, h_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            bound = np.sqrt(6.0 / (h_in + h_out))
            weights.append(rng.uniform(-bound, bound, size=(h_out, h_in)))
        return cls(tuple(weights), noise_std)

    @property
    def layer_sizes(self) -> tuple:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    def mean(self, x) -> float | np.ndarray:
        return nn_forward(self, x)


@dataclass(frozen=True)
class TabularOracle:
    """Finite arm set with stored true values ``y_i``; arms are addressed by index."""

    arms: np.ndarray
    values: np.ndarray
    noise_std: float = 1.0
    feature_names: tuple | None = None
    value_name: str = "value"

    def __post_init__(self):
        arms = np.atleast_2d(np.asarray(self.arms, dtype=float))
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if arms.shape[0] != values.shape[0] or values.shape[0] < 1:
            raise ValueError(f"need matching, non-empty arms and values (got {arms.shape[0]} and {values.shape[0]})")
        object.__setattr__(self, "arms", arms)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.shape[0]

    def mean(self, index) -> float | np.ndarray:
        index = np.asarray(index)
        if np.any(index < 0) or np.any(index >= len(self)):
            raise ValueError(f"arm index out of range [0, {len(self)})")
        return self.values[index]


def reward(oracle, x, rng: np.random.Generator) -> float:
    """Noisy reward ``f(x) + noise_std * z`` with ``z`` drawn from ``rng``.

    ``x`` is an input vector for the linear and neural oracles and an arm
    index for :class:`TabularOracle`.
    """
    return float(oracle.mean(x)) + oracle.noise_std * rng.standard_normal()


def nn_forward(oracle: NeuralOracle, x) -> float | np.ndarray:
    """Forward pass on one binary input (or the rows of an array of them)."""
    x = np.asarray(x, dtype=float)
    n_in = oracle.weights[0].shape[1]
    if x.shape[-1:] != (n_in,):
        raise ValueError(f"network expects inputs of length {n_in}, got shape {x.shape}")
    if not np.all((x == 0.0) | (x == 1.0)):
        raise ValueError("network inputs must be binary")
    h = x.T
    for w in oracle.weights[:-1]:
        h = np.maximum(w @ h, 0.0)
    out = oracle.weights[-1] @ h
    out = oracle.scale * out[0] + oracle.shift
    return float(out) if np.ndim(out) == 0 else out


def all_binary_strings(n: int = 14) -> np.ndarray:
    """All ``2**n`` binary vectors, row ``i`` holding the bits of ``i`` (MSB first)."""
    ids = np.arange(2**n)
    return ((ids[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(float)


def random_unit_theta(d: int, rng: np.random.Generator) -> np.ndarray:
    theta = rng.standard_normal(d)
    return theta / np.linalg.norm(theta)


# ---------------------------------------------------------------- features


def _quadratic(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    iu, ju = np.triu_indices(n)
    return np.concatenate([x, x[..., iu] * x[..., ju]], axis=-1)


def _onehot(seq, alphabet: str) -> np.ndarray:
    lookup = {ch: i for i, ch in enumerate(alphabet)}
    if isinstance(seq, str):
        seqs, single = [seq], True
    else:
        seqs = list(seq)
        # a list of single symbols is one sequence, a list of strings a batch
        single = all(not isinstance(s, str) or len(s) == 1 for s in seqs) and not any(
            isinstance(s, (list, tuple, np.ndarray)) for s in seqs
        )
        if single:
            seqs = [seqs]
    lengths = {len(s) for s in seqs}
    if len(lengths) != 1:
        raise ValueError("one-hot inputs must share a length")
    (n,) = lengths
    out = np.zeros((len(seqs), n * len(alphabet)))
    for r, s in enumerate(seqs):
        for pos, ch in enumerate(s):
            if ch not in lookup:
                raise ValueError(f"symbol {ch!r} not in alphabet {alphabet!r}")
            out[r, pos * len(alphabet) + lookup[ch]] = 1.0
    return out[0] if single else out


def random_relu_matrix(k: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """``k x d`` standard-normal projection for the random ReLU feature map."""
    return rng.standard_normal((k, d))


def expand_features(x, scheme: str = "linear", *, weights=None, alphabet: str = "ACGT") -> np.ndarray:
    """Map raw inputs to features.

    ``x`` is one raw input or a batch of them (rows).  Schemes:

    * ``linear`` -- identity
    * ``quadratic`` -- raw inputs followed by all products ``x_i x_j``, ``i <= j``
    * ``onehot`` -- categorical sequence over ``alphabet``, one block per position
    * ``onehot_quadratic`` -- ``quadratic`` applied to the one-hot encoding
    * ``random_relu`` -- ``ReLU(W x / sqrt(d)) / sqrt(k)`` with ``W = weights``
    """
    if scheme not in FEATURE_SCHEMES:
        raise ValueError(f"unknown feature scheme {scheme!r}")
    if scheme in ("onehot", "onehot_quadratic"):
        enc = _onehot(x, alphabet)
        return enc if scheme == "onehot" else _quadratic(enc)
    try:
        x = np.asarray(x, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"scheme {scheme!r} needs numeric input") from exc
    if x.ndim not in (1, 2):
        raise ValueError("inputs must be a vector or a 2-d batch")
    if scheme == "linear":
        return x.copy()
    if scheme == "quadratic":
        return _quadratic(x)
    if weights is None:
        raise ValueError("random_relu needs the projection matrix (see random_relu_matrix)")
    weights = np.asarray(weights, dtype=float)
    k, d = weights.shape
    if x.shape[-1] != d:
        raise ValueError(f"projection expects inputs of length {d}, got {x.shape[-1]}")
    return np.maximum(x @ weights.T / np.sqrt(d), 0.0) / np.sqrt(k)


# ---------------------------------------------------------------- contexts


class ContextMode(str, enum.Enum):
    FIXED_GLOBAL = "fixed"
    CHANGING_PER_STEP = "changing"
    TABULAR_GLOBAL = "tabular"


@dataclass
class ContextGenerator:
    """Produces the arm list shown to processor ``p`` in round ``t``.

    ``fixed`` draws ``m`` Gaussian vectors once (memoized), ``changing``
    draws a fresh list on every call, ``tabular`` always returns ``arms``.
    With ``normalize`` the Gaussian vectors are projected to the unit sphere.
    """

    mode: ContextMode
    m: int
    d: int
    normalize: bool = True
    arms: np.ndarray | None = None
    _memo: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.mode = ContextMode(self.mode)
        if self.mode is ContextMode.TABULAR_GLOBAL:
            if self.arms is None:
                raise ValueError("tabular contexts need an arm array")
            self.arms = np.atleast_2d(np.asarray(self.arms, dtype=float))
            self.m, self.d = self.arms.shape
        if self.m < 1:
            raise ValueError("contexts need at least one arm")

    def _draw(self, rng):
        x = rng.standard_normal((self.m, self.d))
        if self.normalize:
            x /= np.linalg.norm(x, axis=1, keepdims=True)
        return x


def gen_context(gen: ContextGenerator, t: int, p: int, rng: np.random.Generator) -> np.ndarray:
    """Arm list for ``(t, p)``; global modes return the same array object every call."""
    if gen.mode is ContextMode.CHANGING_PER_STEP:
        return gen._draw(rng)
    if gen.mode is ContextMode.TABULAR_GLOBAL:
        return gen.arms
    if gen._memo is None:
        gen._memo = gen._draw(rng)
    return gen._memo


@dataclass
class Context:
    """One presented arm list: policy features, oracle inputs and noiseless values."""

    features: np.ndarray
    values: np.ndarray
    inputs: np.ndarray | None = None

    @property
    def best_value(self) -> float:
        return float(self.values.max())


@dataclass
class Environment:
    """Oracle plus context source, producing :class:`Context` objects.

    Global contexts are built once and the same object is returned for every
    ``(t, p)``.  For the tabular oracle the oracle inputs are arm indices; for
    the neural oracle they are the binary strings behind each feature row.
    """

    oracle: object
    generator: ContextGenerator | None = None
    global_context: Context | None = None

    @property
    def is_global(self) -> bool:
        return self.global_context is not None

    def context(self, t: int, p: int, rng: np.random.Generator) -> Context:
        if self.global_context is not None:
            return self.global_context
        x = gen_context(self.generator, t, p, rng)
        return Context(x, self.oracle.mean(x), x)

    def noisy(self, ctx: Context, idx: int, rng: np.random.Generator) -> float:
        return float(ctx.values[idx]) + self.oracle.noise_std * rng.standard_normal()

    @classmethod
    def linear(cls, d, m, mode, rng, noise_std=1.0, normalize=True) -> "Environment":
        """Linear oracle with a unit-norm Gaussian ``theta_star``."""
        theta = random_unit_theta(d, rng)
        oracle = LinearOracle(theta, noise_std)
        gen = ContextGenerator(ContextMode(mode), m, d, normalize)
        env = cls(oracle, gen)
        if gen.mode is ContextMode.FIXED_GLOBAL:
            x = gen_context(gen, 1, 1, rng)
            env.global_context = Context(x, oracle.mean(x), x)
        return env

    @classmethod
    def neural(cls, rng, features="quadratic", m=None, noise_std=0.5) -> "Environment":
        """Random network over binary strings; ``m`` samples a subset of all ``2**14`` inputs."""
        oracle = NeuralOracle.xavier(rng, noise_std=noise_std)
        raw = all_binary_strings(oracle.layer_sizes[0])
        if m is not None and m < raw.shape[0]:
            raw = raw[np.sort(rng.choice(raw.shape[0], size=m, replace=False))]
        feats = expand_features(raw, features)
        ctx = Context(np.ascontiguousarray(feats), oracle.mean(raw), raw)
        return cls(oracle, ContextGenerator(ContextMode.TABULAR_GLOBAL, 0, 0, arms=feats), ctx)

    @classmethod
    def tabular(cls, oracle: TabularOracle, features="linear", weights=None) -> "Environment":
        feats = expand_features(oracle.arms, features, weights=weights)
        ctx = Context(np.ascontiguousarray(feats), oracle.values.copy(), np.arange(len(oracle)))
        return cls(oracle, ContextGenerator(ContextMode.TABULAR_GLOBAL, 0, 0, arms=feats), ctx)


# ---------------------------------------------------------------- CSV


def _resolve_columns(header, feature_columns, value_column):
    def index_of(col):
        if isinstance(col, (int, np.integer)):
            if not 0 <= col < len(header):
                raise TabularParseError(f"column index {col} out of range (file has {len(header)} columns)")
            return int(col)
        if col not in header:
            raise TabularParseError(f"missing column {col!r}; available: {', '.join(header)}")
        return header.index(col)

    v = index_of(value_column)
    if feature_columns is None:
        f = [i for i in range(len(header)) if i != v]
    elif isinstance(feature_columns, slice):
        f = list(range(len(header)))[feature_columns]
    elif isinstance(feature_columns, str) and ":" in feature_columns:
        lo, hi = feature_columns.split(":")
        f = list(range(len(header)))[slice(int(lo) if lo else None, int(hi) if hi else None)]
    else:
        f = [index_of(c) for c in feature_columns]
    if not f:
        raise TabularParseError("no feature columns selected")
    return f, v


def load_tabular_csv(
    path,
    feature_columns=None,
    value_column="value",
    noise_std: float = 1.0,
    standardize: bool = False,
) -> TabularOracle:
    """Read a comma-separated file with a header row into a :class:`TabularOracle`.

    ``feature_columns`` may be a list of names or indices, a ``slice`` or a
    ``"start:stop"`` string over column positions; ``None`` takes every
    column except the value column.  Rows are numbered from 1 after the
    header in error messages.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TabularParseError(f"{path}: empty file")
        header = [h.strip() for h in header]
        f_idx, v_idx = _resolve_columns(header, feature_columns, value_column)
        arms, values = [], []
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise TabularParseError(f"{path}: row {row_no} has {len(row)} fields, header has {len(header)}")
            parsed = []
            for i in f_idx + [v_idx]:
                try:
                    parsed.append(float(row[i]))
                except ValueError:
                    raise TabularParseError(
                        f"{path}: row {row_no}, column {header[i]!r}: non-numeric value {row[i]!r}"
                    ) from None
            arms.append(parsed[:-1])
            values.append(parsed[-1])
    if not values:
        raise TabularParseError(f"{path}: no data rows")
    arms = np.array(arms)
    if standardize:
        sd = arms.std(axis=0)
        arms = (arms - arms.mean(axis=0)) / np.where(sd > 0, sd, 1.0)
    return TabularOracle(
        arms, np.array(values), noise_std, tuple(header[i] for i in f_idx), header[v_idx]
    )


def write_tabular_csv(oracle: TabularOracle, path) -> None:
    """Write ``oracle`` in the format :func:`load_tabular_csv` reads, losslessly."""
    names = oracle.feature_names or tuple(f"x{i}" for i in range(oracle.arms.shape[1]))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(names) + [oracle.value_name])
        for x, y in zip(oracle.arms, oracle.values):
            w.writerow([repr(float(v)) for v in x] + [repr(float(y))])


def make_superconductor_like(m: int, d: int, rng: np.random.Generator, noise_std: float = 100.0) -> TabularOracle:
    """Fabricated stand-in for a materials table: ``m`` rows of ``d``
    positive, skewed features and a heavy-tailed non-negative target."""
    latent = rng.standard_normal((m, 3))
    mix = rng.standard_normal((3, d))
    arms = np.exp(0.5 * latent @ mix / np.sqrt(3) + 0.3 * rng.standard_normal((m, d)))
    w = rng.standard_normal(d) / np.sqrt(d)
    score = np.log(arms) @ w + 0.5 * rng.standard_normal(m)
    values = 10.0 * np.exp(score - score.mean() + 0.5)
    values = np.minimum(values, 185.0)
    names = tuple(f"f{i}" for i in range(d))
    return TabularOracle(arms, values, noise_std, names, "critical_temp")
