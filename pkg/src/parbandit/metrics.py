"""Regret accounting, doubling-round statistics and theoretical bound calculators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RegretLedger",
    "BoundInputs",
    "AggregateCurves",
    "instantaneous_regret",
    "best_regret",
    "simple_regret_policy",
    "bound_doubling_arbitrary",
    "bound_doubling_finite",
    "burn_in_rich",
    "aggregate_trials",
    "moving_average",
]


class RegretLedger:
    """Per-``(t, p)`` record of one trial.

    Arrays indexed ``[t - 1, p - 1]``: ``arm_indices``, ``rewards``,
    ``inst_regret`` and ``chosen_values`` (noiseless value of the played
    arm).  Per round: ``doubling`` and ``alpha_min``.
    """

    def __init__(self, T: int, P: int):
        self.T = T
        self.P = P
        self.arm_indices = np.zeros((T, P), dtype=np.int64)
        self.rewards = np.zeros((T, P))
        self.inst_regret = np.zeros((T, P))
        self.chosen_values = np.zeros((T, P))
        self.doubling = np.zeros(T, dtype=bool)
        self.alpha_min = np.ones(T)
        self.rounds = 0

    def record(self, arm_indices, rewards, inst_regret, chosen_values, is_doubling, alpha_min) -> None:
        t = self.rounds
        if t >= self.T:
            raise IndexError("ledger is full")
        if np.any(np.asarray(inst_regret) < -1e-9):
            raise ValueError("instantaneous regret must be non-negative")
        self.arm_indices[t] = arm_indices
        self.rewards[t] = rewards
        self.inst_regret[t] = inst_regret
        self.chosen_values[t] = chosen_values
        self.doubling[t] = is_doubling
        self.alpha_min[t] = alpha_min
        self.rounds += 1

    @property
    def per_processor(self) -> np.ndarray:
        """Cumulative regret of each processor over all rounds."""
        return self.inst_regret.sum(axis=0)

    @property
    def parallel_regret(self) -> float:
        return float(self.inst_regret.sum())

    @property
    def n_doubling(self) -> int:
        return int(self.doubling.sum())

    def cumulative_curve(self) -> np.ndarray:
        """Cumulative parallel regret after each query, in ``(t, p)`` order."""
        return np.cumsum(self.inst_regret.reshape(-1))

    def best_value_curve(self) -> np.ndarray:
        """Best noiseless value among the arms played so far."""
        return np.maximum.accumulate(self.chosen_values.reshape(-1))

    def alpha_curve(self) -> np.ndarray:
        """Round-level doubling coefficient repeated for each query of the round."""
        return np.repeat(self.alpha_min, self.P)


@dataclass(frozen=True)
class BoundInputs:
    d: int
    T: int
    P: int
    L: float = 1.0
    lam: float = 1.0
    m: int | None = None
    chi2: float | None = None
    pi_min2: float | None = None
    pi_max2: float | None = None


def instantaneous_regret(oracle, context, chosen) -> float:
    """``max_{x in context} f(x) - f(chosen)``.

    ``context`` holds oracle inputs (one per row, or arm indices for a tabular
    oracle); ``chosen`` is a row index into it or an input that must appear
    in it.
    """
    context = np.asarray(context)
    values = np.asarray(oracle.mean(context), dtype=float).reshape(-1)
    if isinstance(chosen, (int, np.integer)):
        if not 0 <= chosen < values.shape[0]:
            raise ValueError(f"chosen index {chosen} is not in the context")
        idx = int(chosen)
    else:
        chosen = np.asarray(chosen)
        hits = np.flatnonzero(np.all(context.reshape(len(context), -1) == chosen.reshape(1, -1), axis=1))
        if hits.size == 0:
            raise ValueError("chosen arm is not in the context")
        idx = int(hits[0])
    return float(values.max() - values[idx])


def best_regret(ledger: RegretLedger) -> float:
    """Regret of the best processor in hindsight."""
    best = float(ledger.per_processor.min())
    bound = ledger.parallel_regret / ledger.P
    assert best <= bound + 1e-9 * max(1.0, abs(bound)), "best regret exceeds the parallel average"
    return best


def simple_regret_policy(ledger: RegretLedger, values, rng: np.random.Generator) -> float:
    """Simple regret of the randomized next-step policy on a fixed global context.

    Draws one of the ``T * P`` played arms uniformly and returns
    ``max(values) - values[arm]``; its expectation is the average
    instantaneous regret.  ``values`` are the noiseless values of the
    global arm list, indexed like ``ledger.arm_indices``.
    """
    values = np.asarray(values, dtype=float)
    played = ledger.arm_indices[: ledger.rounds].reshape(-1)
    if played.size == 0:
        raise ValueError("ledger is empty")
    arm = played[rng.integers(played.size)]
    return float(values.max() - values[arm])


def bound_doubling_arbitrary(inputs: BoundInputs) -> int:
    """``ceil(d / ln 2 * ln(1 + T P L^2 / (d lam)))``: doubling rounds on any context sequence."""
    x = inputs.d / math.log(2.0) * math.log1p(inputs.T * inputs.P * inputs.L**2 / (inputs.d * inputs.lam))
    return int(math.ceil(x))


def bound_doubling_finite(m: int, P: int) -> int:
    """``m * ceil(log2 P)``: doubling rounds when every context is drawn from ``m`` fixed arms."""
    if m < 1 or P < 1:
        raise ValueError("m and P must be positive")
    return m * (int(P) - 1).bit_length()


def burn_in_rich(inputs: BoundInputs) -> float | None:
    """Burn-in coefficient ``L^2 pi_max^2 / pi_min^4 + P chi^2 / pi_min^2`` for
    rich exploration contexts, or ``None`` when the constants are not given."""
    if inputs.chi2 is None or inputs.pi_min2 is None or inputs.pi_max2 is None:
        return None
    return inputs.L**2 * inputs.pi_max2 / inputs.pi_min2**2 + inputs.P * inputs.chi2 / inputs.pi_min2


def moving_average(x, window: int = 30) -> np.ndarray:
    """Trailing moving average; the first ``window - 1`` points average what is available."""
    x = np.asarray(x, dtype=float)
    if window < 1:
        raise ValueError("window must be positive")
    c = np.cumsum(np.concatenate([[0.0], x]))
    n = np.arange(1, x.size + 1)
    lo = np.maximum(n - window, 0)
    return (c[n] - c[lo]) / (n - lo)


@dataclass
class AggregateCurves:
    """Pointwise statistics over trials, indexed by total queries ``(t - 1) P + p``.

    Standard deviations divide by the number of trials.
    """

    mean_cum_regret: np.ndarray
    std_cum_regret: np.ndarray
    mean_best_value: np.ndarray
    smoothed_best_value: np.ndarray
    mean_alpha_min: np.ndarray
    n_trials: int


def aggregate_trials(ledgers, window: int = 30) -> AggregateCurves:
    if not ledgers:
        raise ValueError("no ledgers to aggregate")
    curves = np.stack([lg.cumulative_curve() for lg in ledgers])
    best = np.stack([lg.best_value_curve() for lg in ledgers]).mean(axis=0)
    alpha = np.stack([lg.alpha_curve() for lg in ledgers]).mean(axis=0)
    return AggregateCurves(
        mean_cum_regret=curves.mean(axis=0),
        std_cum_regret=curves.std(axis=0),
        mean_best_value=best,
        smoothed_best_value=moving_average(best, window),
        mean_alpha_min=alpha,
        n_trials=len(ledgers),
    )
