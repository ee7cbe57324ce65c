"""Ridge estimation, confidence radii and the two exploration rules built on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .linalg import CovarianceState, inv_sqrt_apply, mahalanobis_inv, make_regularized

__all__ = [
    "ProblemScales",
    "RegressionSums",
    "ConfidenceSet",
    "ridge_estimate",
    "beta_radius",
    "ucb_score",
    "ucb_scores",
    "ts_sample",
    "contains",
    "LAZY_INFLATION",
]

LAZY_INFLATION = float(np.sqrt(2.0))


@dataclass(frozen=True)
class ProblemScales:
    """Problem constants: noise scale ``R``, parameter bound ``S``, action
    bound ``L``, ridge ``lam``, misspecification ``eps`` and failure
    probability ``delta``."""

    R: float = 1.0
    S: float = 1.0
    L: float = 1.0
    lam: float = 1.0
    eps: float = 0.0
    delta: float = 0.05

    def __post_init__(self):
        if self.R < 0:
            raise ValueError(f"R must be >= 0, got {self.R}")
        if not self.S > 0:
            raise ValueError(f"S must be > 0, got {self.S}")
        if not self.L > 0:
            raise ValueError(f"L must be > 0, got {self.L}")
        if not self.lam > 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if self.eps < 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")

    def snr(self) -> float:
        if self.R == 0:
            return float("inf")
        return (self.L * self.S / self.R) ** 2


@dataclass
class RegressionSums:
    """Sufficient statistics of the ridge regression: ``sum x r``, the count
    and the covariance over the same arms."""

    xty: np.ndarray
    count: int
    cov: CovarianceState

    @classmethod
    def empty(cls, d: int, lam: float) -> "RegressionSums":
        return cls(np.zeros(d), 0, make_regularized(d, lam))

    def copy(self) -> "RegressionSums":
        return RegressionSums(self.xty.copy(), self.count, self.cov.copy())

    def add(self, xs, rewards) -> "RegressionSums":
        """Fold observations in place."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        rewards = np.atleast_1d(np.asarray(rewards, dtype=float))
        if xs.shape[0] != rewards.shape[0]:
            raise ValueError(f"{xs.shape[0]} actions but {rewards.shape[0]} rewards")
        self.xty += xs.T @ rewards
        self.count += xs.shape[0]
        self.cov.update_many(xs)
        return self


@dataclass
class ConfidenceSet:
    """Ellipsoid ``{theta : ||theta - center||_V <= inflation * radius}``."""

    center: np.ndarray
    cov: CovarianceState
    radius: float
    inflation: float = 1.0

    @property
    def width(self) -> float:
        return self.inflation * self.radius


def ridge_estimate(sums: RegressionSums) -> np.ndarray:
    """``V^{-1} sum(x r)`` solved through the Cholesky factor."""
    if sums.count == 0:
        return np.zeros(sums.cov.dim)
    return sla.cho_solve((sums.cov.factor, True), sums.xty, check_finite=False)


def beta_radius(scales: ProblemScales, cov: CovarianceState, t: int, P: int) -> float:
    """Confidence radius at the head of round ``t``.

    Uses the exact log-determinant form
    ``R * sqrt(log det V - d log lam + 2 log(1/delta)) + sqrt(lam) S``
    and adds the misspecification term ``sqrt((t - 1) P) * eps``.
    """
    if not 0.0 < scales.delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {scales.delta}")
    if t < 1 or P < 1:
        raise ValueError("round index and processor count start at 1")
    log_term = cov.logdet - cov.dim * np.log(scales.lam) - 2.0 * np.log(scales.delta)
    sqrt_beta = scales.R * np.sqrt(max(log_term, 0.0)) + np.sqrt(scales.lam) * scales.S
    return float(sqrt_beta + np.sqrt((t - 1) * P) * scales.eps)


def ucb_score(x, cset: ConfidenceSet) -> float:
    """Optimistic value ``x^T center + inflation * radius * ||x||_{V^{-1}}``."""
    x = np.asarray(x, dtype=float)
    bonus = 0.0 if cset.width == 0.0 else cset.width * mahalanobis_inv(cset.cov, x)
    return float(x @ cset.center + bonus)


def ucb_scores(X, cset: ConfidenceSet) -> np.ndarray:
    """Vectorised :func:`ucb_score` over the rows of ``X``."""
    X = np.asarray(X, dtype=float)
    mean = X @ cset.center
    if cset.width == 0.0:
        return mean
    return mean + cset.width * mahalanobis_inv(cset.cov, X)


def ts_sample(cset: ConfidenceSet, eta) -> np.ndarray:
    """Perturbed parameter ``center + inflation * radius * C^{-T} eta``."""
    return cset.center + cset.width * inv_sqrt_apply(cset.cov, eta)


def contains(cset: ConfidenceSet, theta) -> bool:
    """Whether ``theta`` lies in the ellipsoid (absolute slack 1e-12)."""
    diff = np.asarray(theta, dtype=float) - cset.center
    if diff.shape != (cset.cov.dim,):
        raise ValueError(f"expected a vector of dimension {cset.cov.dim}")
    dist = float(np.linalg.norm(cset.cov.factor.T @ diff))
    return dist <= cset.width + 1e-12
