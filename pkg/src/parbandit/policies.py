"""Parallel linear bandit policies.

Every round the policy proposes one candidate arm per processor from the
statistics available at the start of the round, checks whether the
candidates would more than double the covariance in some direction (a
*doubling round*), and if so hands the batch to a doubling-round routine.
Rewards are only folded in by :func:`observe_batch`, after the whole batch.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg as sla

from .confidence import (
    LAZY_INFLATION,
    ConfidenceSet,
    ProblemScales,
    RegressionSums,
    beta_radius,
    ridge_estimate,
    ts_sample,
)
from .linalg import CovarianceState, mahalanobis_inv, psd_dominates

__all__ = [
    "PolicyKind",
    "DRRoutine",
    "PolicyConfig",
    "RoundState",
    "BatchDecision",
    "UnsupportedConfigurationError",
    "initial_state",
    "select_batch",
    "observe_batch",
    "dr_identity",
    "dr_random_explore",
    "cci_prefixes_hold",
]


class UnsupportedConfigurationError(ValueError):
    """A policy was asked to run in a setting it does not support."""


class PolicyKind(str, enum.Enum):
    LINUCB = "LinUCB"
    LAZY_LINUCB = "LazyLinUCB"
    LINTS = "LinTS"
    LAZY_LINTS = "LazyLinTS"
    EPSILON_GREEDY = "EpsilonGreedy"

    @property
    def is_lazy(self) -> bool:
        return self in (PolicyKind.LAZY_LINUCB, PolicyKind.LAZY_LINTS)

    @property
    def is_thompson(self) -> bool:
        return self in (PolicyKind.LINTS, PolicyKind.LAZY_LINTS)


class DRRoutine(str, enum.Enum):
    IDENTITY = "identity"
    RANDOM_EXPLORE = "random_explore"


@dataclass(frozen=True)
class PolicyConfig:
    kind: PolicyKind
    scales: ProblemScales = field(default_factory=ProblemScales)
    dr_routine: DRRoutine = DRRoutine.IDENTITY
    cci_constant: float = 2.0
    epsilon_greedy_rate: float = 0.1
    lazy_inflation: float = LAZY_INFLATION

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        object.__setattr__(self, "dr_routine", DRRoutine(self.dr_routine))
        if not self.cci_constant > 1:
            raise ValueError(f"cci_constant must exceed 1, got {self.cci_constant}")
        if not 0.0 <= self.epsilon_greedy_rate <= 1.0:
            raise ValueError(f"epsilon_greedy_rate must lie in [0, 1], got {self.epsilon_greedy_rate}")

    def inflation(self, P: int) -> float:
        # with one processor there is no intra-round update to compensate for
        return self.lazy_inflation if self.kind.is_lazy and P > 1 else 1.0


@dataclass
class RoundState:
    """Everything a policy knows at the head of round ``t``."""

    t: int
    theta_hat: np.ndarray
    cov_start: CovarianceState
    radius: float
    history: RegressionSums
    arm_counts: np.ndarray | None = None
    arm_sums: np.ndarray | None = None


@dataclass
class BatchDecision:
    actions: np.ndarray
    arm_indices: np.ndarray
    candidates: np.ndarray
    candidate_indices: np.ndarray
    is_doubling_round: bool
    alpha_min: float


def initial_state(policy: PolicyConfig, d: int, P: int, n_arms: int | None = None) -> RoundState:
    """State before any observation; ``n_arms`` sizes the per-arm tables of
    the epsilon-greedy baseline."""
    history = RegressionSums.empty(d, policy.scales.lam)
    state = RoundState(
        t=1,
        theta_hat=np.zeros(d),
        cov_start=history.cov.copy(),
        radius=beta_radius(policy.scales, history.cov, 1, P),
        history=history,
    )
    if n_arms is not None:
        state.arm_counts = np.zeros(n_arms, dtype=np.int64)
        state.arm_sums = np.zeros(n_arms)
    return state


def dr_identity(candidates):
    """Doubling-round routine that keeps the proposed batch."""
    return candidates


def dr_random_explore(contexts: Sequence[np.ndarray], rng: np.random.Generator) -> np.ndarray:
    """Draw one arm index per processor uniformly from its context."""
    idx = np.empty(len(contexts), dtype=np.int64)
    for p, ctx in enumerate(contexts):
        m = len(ctx)
        if m == 0:
            raise ValueError(f"context {p} is empty")
        idx[p] = rng.integers(m)
    return idx


def _check_contexts(contexts, d):
    if len(contexts) == 0:
        raise ValueError("need at least one processor")
    for p, ctx in enumerate(contexts):
        if ctx.ndim != 2 or ctx.shape[0] == 0:
            raise ValueError(f"context {p} is empty")
        if ctx.shape[1] != d:
            raise ValueError(f"context {p} has dimension {ctx.shape[1]}, expected {d}")


def _shared(contexts) -> bool:
    first = contexts[0]
    return all(c is first for c in contexts)


def _linucb(state, contexts, width):
    cset = ConfidenceSet(state.theta_hat, state.cov_start, state.radius)
    cache = {}
    out = np.empty(len(contexts), dtype=np.int64)
    for p, ctx in enumerate(contexts):
        key = id(ctx)
        if key not in cache:
            scores = ctx @ cset.center
            if width != 0.0:
                scores = scores + width * mahalanobis_inv(cset.cov, ctx)
            cache[key] = int(np.argmax(scores))
        out[p] = cache[key]
    return out, None


def _lazy_linucb(state, contexts, width):
    P = len(contexts)
    cov = state.cov_start.copy()
    out = np.empty(P, dtype=np.int64)
    if _shared(contexts) and P > 1:
        # squared widths tracked by Sherman-Morrison as the covariance grows
        X = contexts[0]
        mean = X @ state.theta_hat
        sq = mahalanobis_inv(cov, X) ** 2
        for p in range(P):
            scores = mean + width * np.sqrt(np.maximum(sq, 0.0))
            i = int(np.argmax(scores))
            out[p] = i
            if p + 1 < P:
                y = X[i]
                u = sla.cho_solve((cov.factor, True), y, check_finite=False)
                proj = X @ u
                sq -= proj * proj / (1.0 + y @ u)
            cov.update(X[i])
        return out, cov
    for p, ctx in enumerate(contexts):
        scores = ctx @ state.theta_hat
        if width != 0.0:
            scores = scores + width * mahalanobis_inv(cov, ctx)
        i = int(np.argmax(scores))
        out[p] = i
        cov.update(ctx[i])
    return out, cov


def _lints(state, contexts, inflation, rng):
    P = len(contexts)
    eta = rng.standard_normal((P, state.cov_start.dim))
    thetas = ts_sample(ConfidenceSet(state.theta_hat, state.cov_start, state.radius, inflation), eta)
    out = np.empty(P, dtype=np.int64)
    if P > 1 and _shared(contexts):
        out[:] = np.argmax(contexts[0] @ thetas.T, axis=0)
    else:
        for p, ctx in enumerate(contexts):
            out[p] = int(np.argmax(ctx @ thetas[p]))
    return out, None


def _lazy_lints(state, contexts, inflation, rng):
    cov = state.cov_start.copy()
    out = np.empty(len(contexts), dtype=np.int64)
    for p, ctx in enumerate(contexts):
        eta = rng.standard_normal(cov.dim)
        theta = ts_sample(ConfidenceSet(state.theta_hat, cov, state.radius, inflation), eta)
        i = int(np.argmax(ctx @ theta))
        out[p] = i
        cov.update(ctx[i])
    return out, cov


def _epsilon_greedy(policy, state, contexts, rng):
    if not _shared(contexts) or state.arm_counts is None:
        raise UnsupportedConfigurationError("epsilon-greedy needs one fixed, finite global context")
    m = contexts[0].shape[0]
    if state.arm_counts.shape[0] != m:
        raise UnsupportedConfigurationError(f"arm tables sized {state.arm_counts.shape[0]} but context has {m} arms")
    means = np.divide(state.arm_sums, state.arm_counts, out=np.zeros(m), where=state.arm_counts > 0)
    greedy = int(np.argmax(means))
    out = np.empty(len(contexts), dtype=np.int64)
    for p in range(len(contexts)):
        if rng.random() < policy.epsilon_greedy_rate:
            out[p] = rng.integers(m)
        else:
            out[p] = greedy
    return out


def select_batch(
    policy: PolicyConfig,
    state: RoundState,
    contexts: Sequence[np.ndarray],
    rng: np.random.Generator,
) -> BatchDecision:
    """Choose the ``P = len(contexts)`` arms queried in round ``state.t``.

    ``contexts[p]`` is an ``(m_p, d)`` array of arm features for processor
    ``p``.  Passing the *same* array object for every processor marks a
    shared global context; the selected arms do not depend on this, it only
    enables cheaper code paths.
    """
    contexts = [np.asarray(c, dtype=float) if not isinstance(c, np.ndarray) else c for c in contexts]
    d = state.cov_start.dim
    _check_contexts(contexts, d)
    P = len(contexts)
    kind = policy.kind

    intra_cov = None
    if kind is PolicyKind.EPSILON_GREEDY:
        cand_idx = _epsilon_greedy(policy, state, contexts, rng)
    else:
        inflation = policy.inflation(P)
        width = inflation * state.radius
        if kind is PolicyKind.LINUCB:
            cand_idx, intra_cov = _linucb(state, contexts, width)
        elif kind is PolicyKind.LAZY_LINUCB:
            cand_idx, intra_cov = _lazy_linucb(state, contexts, width)
        elif kind is PolicyKind.LINTS:
            cand_idx, intra_cov = _lints(state, contexts, inflation, rng)
        else:
            cand_idx, intra_cov = _lazy_lints(state, contexts, inflation, rng)

    candidates = np.stack([contexts[p][cand_idx[p]] for p in range(P)])
    if intra_cov is None:
        intra_cov = state.cov_start.copy().update_many(candidates)
    check = psd_dominates(intra_cov, state.cov_start, policy.cci_constant)
    alpha_min = max(1.0, check.witness_value)
    # the baseline keeps no confidence set, so it never reacts to doubling
    is_doubling = (not check.dominated) and kind is not PolicyKind.EPSILON_GREEDY

    if is_doubling and policy.dr_routine is DRRoutine.RANDOM_EXPLORE:
        arm_idx = dr_random_explore(contexts, rng)
        actions = np.stack([contexts[p][arm_idx[p]] for p in range(P)])
    else:
        arm_idx = dr_identity(cand_idx).copy()
        actions = candidates.copy()
    return BatchDecision(actions, arm_idx, candidates, cand_idx, bool(is_doubling), float(alpha_min))


def observe_batch(policy: PolicyConfig, state: RoundState, decision: BatchDecision, rewards) -> RoundState:
    """Fold the batch's rewards into the statistics and open round ``t + 1``."""
    rewards = np.asarray(rewards, dtype=float).reshape(-1)
    P = decision.actions.shape[0]
    if rewards.shape[0] != P:
        raise ValueError(f"{P} actions but {rewards.shape[0]} rewards")
    history = state.history.copy().add(decision.actions, rewards)
    nxt = RoundState(
        t=state.t + 1,
        theta_hat=ridge_estimate(history),
        cov_start=history.cov.copy(),
        radius=beta_radius(policy.scales, history.cov, state.t + 1, P),
        history=history,
    )
    if state.arm_counts is not None:
        nxt.arm_counts = state.arm_counts.copy()
        nxt.arm_sums = state.arm_sums.copy()
        np.add.at(nxt.arm_counts, decision.arm_indices, 1)
        np.add.at(nxt.arm_sums, decision.arm_indices, rewards)
    return nxt


def cci_prefixes_hold(cov_start: CovarianceState, actions, c: float = 2.0) -> bool:
    """Check ``V_{t,1} <= V_{t,p} <= c V_{t,1}`` for every intra-round prefix.

    Intended for tests and debugging; the policies only test the full batch.
    """
    cov = cov_start.copy()
    for x in np.atleast_2d(actions):
        cov.update(x)
        if not psd_dominates(cov, cov_start, c).dominated:
            return False
        if not psd_dominates(cov_start, cov, 1.0).dominated:
            return False
    return True
