"""Incremental positive-definite matrix algebra.

The central object is :class:`CovarianceState`, a regularized Gram matrix
``V = lam * I + sum_i x_i x_i^T`` stored together with its lower Cholesky
factor and log-determinant.  Single updates refactor through LAPACK for
moderate ``d`` and switch to an O(d^2) Givens sweep for large ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

__all__ = [
    "CovarianceState",
    "PsdComparison",
    "make_regularized",
    "rank1_update",
    "mahalanobis_inv",
    "inv_sqrt_apply",
    "psd_dominates",
    "min_doubling_coefficient",
    "elliptical_potential_check",
    "det_ratio_bound_check",
    "DEFAULT_RTOL",
]

# relative slack on the dominance eigenvalue test
DEFAULT_RTOL = 1e-9
# above this dimension the top generalized eigenvalue is found by power iteration
DENSE_EIG_MAX_DIM = 256
# from this dimension on, single updates use the O(d^2) Givens sweep
RANK1_LOOP_MIN_DIM = 512


class CovarianceState:
    """Regularized Gram matrix with a maintained lower Cholesky factor.

    Attributes
    ----------
    dim : int
        Dimension ``d``.
    lam : float
        Regularizer the state was initialized with.
    gram : ndarray, shape (d, d)
        ``V = lam * I + sum x x^T``.
    factor : ndarray, shape (d, d)
        Lower-triangular ``C`` with ``C @ C.T == gram``.
    logdet : float
        ``log det V``.
    n_updates : int
        Number of rank-1 terms folded in (zero vectors included).
    """

    __slots__ = ("dim", "lam", "gram", "factor", "logdet", "n_updates")

    def __init__(self, dim, lam, gram, factor, logdet, n_updates=0):
        self.dim = dim
        self.lam = lam
        self.gram = gram
        self.factor = factor
        self.logdet = logdet
        self.n_updates = n_updates

    def copy(self) -> "CovarianceState":
        return CovarianceState(
            self.dim,
            self.lam,
            self.gram.copy(),
            self.factor.copy(order="F"),
            self.logdet,
            self.n_updates,
        )

    def _check_vector(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.dim,):
            raise ValueError(f"expected vectors of dimension {self.dim}, got shape {x.shape}")
        return x

    def update(self, x) -> "CovarianceState":
        """Fold ``x x^T`` into the state in place and return ``self``."""
        x = self._check_vector(x)
        if x.ndim != 1:
            raise ValueError("update() takes a single vector; use update_many() for batches")
        self.n_updates += 1
        if not np.any(x):
            return self
        self.gram += np.outer(x, x)
        if self.dim < RANK1_LOOP_MIN_DIM:
            # LAPACK beats the interpreted O(d^2) loop until d is large
            self._refactor()
        else:
            _chol_rank1_inplace(self.factor, x.copy())
            self.logdet = 2.0 * float(np.sum(np.log(np.diag(self.factor))))
        return self

    def update_many(self, xs) -> "CovarianceState":
        """Fold every row of ``xs`` into the state in place.

        Small batches use successive rank-1 modifications; once the batch is
        large relative to ``d`` the factor is recomputed from the Gram matrix,
        which is cheaper and numerically equivalent.
        """
        xs = self._check_vector(xs)
        xs = np.atleast_2d(xs)
        if xs.shape[0] == 0:
            return self
        if xs.shape[0] * 4 < self.dim:
            for x in xs:
                self.update(x)
            return self
        self.n_updates += xs.shape[0]
        self.gram += xs.T @ xs
        self._refactor()
        return self

    def _refactor(self) -> None:
        self.gram = 0.5 * (self.gram + self.gram.T)
        self.factor = np.asfortranarray(sla.cholesky(self.gram, lower=True, check_finite=False))
        self.logdet = 2.0 * float(np.sum(np.log(np.diag(self.factor))))

    @classmethod
    def from_gram(cls, gram, lam=None, n_updates=0) -> "CovarianceState":
        """Build a state from an explicit symmetric positive-definite matrix."""
        gram = np.array(gram, dtype=float)
        if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
            raise ValueError("gram must be a square matrix")
        try:
            factor = sla.cholesky(gram, lower=True)
        except np.linalg.LinAlgError as exc:
            raise ValueError("gram is not positive definite") from exc
        logdet = 2.0 * float(np.sum(np.log(np.diag(factor))))
        return cls(gram.shape[0], lam, gram, np.asfortranarray(factor), logdet, n_updates)

    def __repr__(self) -> str:
        return f"CovarianceState(dim={self.dim}, lam={self.lam}, logdet={self.logdet:.6g}, n_updates={self.n_updates})"


def _chol_rank1_inplace(factor: np.ndarray, x: np.ndarray) -> None:
    # Givens-style update of a lower factor: C C^T + x x^T.  ``x`` is clobbered.
    d = x.shape[0]
    for k in range(d):
        xk = x[k]
        if xk == 0.0:
            continue
        ckk = factor[k, k]
        r = np.hypot(ckk, xk)
        c = r / ckk
        s = xk / ckk
        factor[k, k] = r
        if k + 1 < d:
            col = factor[k + 1 :, k]
            col += s * x[k + 1 :]
            col /= c
            x[k + 1 :] *= c
            x[k + 1 :] -= s * col


@dataclass(frozen=True)
class PsdComparison:
    """Result of testing ``A <= c * B`` in the Loewner order."""

    dominated: bool
    witness_value: float
    tolerance: float


def make_regularized(d: int, lam: float) -> CovarianceState:
    """Return the state ``lam * I_d`` with no updates applied."""
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    if not lam > 0:
        raise ValueError(f"regularizer must be positive, got {lam!r}")
    d = int(d)
    gram = lam * np.eye(d)
    factor = np.asfortranarray(np.sqrt(lam) * np.eye(d))
    return CovarianceState(d, float(lam), gram, factor, d * float(np.log(lam)), 0)


def rank1_update(state: CovarianceState, x) -> CovarianceState:
    """Return a new state equal to ``state`` plus ``x x^T``; ``state`` is untouched."""
    return state.copy().update(x)


def mahalanobis_inv(state: CovarianceState, x) -> float | np.ndarray:
    """``sqrt(x^T V^{-1} x)`` via a triangular solve.

    ``x`` may be a single vector or an ``(m, d)`` array of rows, in which case
    an ``(m,)`` array of norms is returned.
    """
    x = state._check_vector(x)
    if x.ndim == 1:
        z = sla.solve_triangular(state.factor, x, lower=True, check_finite=False)
        return float(np.sqrt(z @ z))
    z = sla.solve_triangular(state.factor, x.T, lower=True, check_finite=False)
    return np.sqrt(np.einsum("ij,ij->j", z, z))


def inv_sqrt_apply(state: CovarianceState, eta) -> np.ndarray:
    """Apply ``M = C^{-T}`` to ``eta``, where ``C`` is the Cholesky factor.

    ``M @ M.T == V^{-1}``, so a standard normal ``eta`` maps to a draw with
    covariance ``V^{-1}``.  Accepts a vector or an ``(n, d)`` array of rows.
    """
    eta = state._check_vector(eta)
    if eta.ndim == 1:
        return sla.solve_triangular(state.factor, eta, lower=True, trans="T", check_finite=False)
    return sla.solve_triangular(state.factor, eta.T, lower=True, trans="T", check_finite=False).T


def _whitened(a_gram: np.ndarray, base: CovarianceState) -> np.ndarray:
    # C_B^{-1} A C_B^{-T}, symmetrized
    y = sla.solve_triangular(base.factor, a_gram, lower=True, check_finite=False)
    w = sla.solve_triangular(base.factor, y.T, lower=True, check_finite=False)
    return 0.5 * (w + w.T)


def _power_top_eig(a_gram: np.ndarray, base: CovarianceState, tol: float = 1e-9, max_iter: int = 10_000) -> float:
    c = base.factor
    v = np.ones(base.dim) / np.sqrt(base.dim)
    lam_old = 0.0
    for _ in range(max_iter):
        u = sla.solve_triangular(c, v, lower=True, trans="T", check_finite=False)
        u = sla.solve_triangular(c, a_gram @ u, lower=True, check_finite=False)
        lam_new = float(v @ u)
        nrm = np.linalg.norm(u)
        if nrm == 0.0:
            return 0.0
        v = u / nrm
        if abs(lam_new - lam_old) <= tol * max(1.0, abs(lam_new)):
            return lam_new
        lam_old = lam_new
    return lam_new


def _top_generalized_eig(a_gram: np.ndarray, base: CovarianceState) -> float:
    if base.dim <= DENSE_EIG_MAX_DIM:
        return float(sla.eigvalsh(_whitened(a_gram, base), subset_by_index=[base.dim - 1, base.dim - 1])[0])
    return _power_top_eig(a_gram, base)


def _gram_of(a) -> np.ndarray:
    if isinstance(a, CovarianceState):
        return a.gram
    return np.asarray(a, dtype=float)


def psd_dominates(A, B: CovarianceState, c: float = 2.0, rtol: float = DEFAULT_RTOL) -> PsdComparison:
    """Decide whether ``A <= c * B`` in the Loewner order.

    The witness is the largest eigenvalue of ``B^{-1/2} A B^{-1/2}``, i.e.
    ``max_x (x^T A x) / (x^T B x)``; ``A`` is dominated iff the witness does
    not exceed ``c`` by more than ``rtol * c``.
    """
    a_gram = _gram_of(A)
    if a_gram.shape != (B.dim, B.dim):
        raise ValueError(f"dimension mismatch: {a_gram.shape} vs ({B.dim}, {B.dim})")
    witness = _top_generalized_eig(a_gram, B)
    tol = rtol * c
    return PsdComparison(bool(witness <= c + tol), witness, tol)


def min_doubling_coefficient(base: CovarianceState, augmented) -> float:
    """Smallest ``alpha >= 1`` with ``augmented <= alpha * base``."""
    a_gram = _gram_of(augmented)
    if a_gram.shape != (base.dim, base.dim):
        raise ValueError(f"dimension mismatch: {a_gram.shape} vs ({base.dim}, {base.dim})")
    return max(1.0, _top_generalized_eig(a_gram, base))


def elliptical_potential_check(lam: float, xs) -> tuple[float, float]:
    """Both sides of the elliptical potential identity for ``xs``.

    Returns ``(lhs, rhs)`` where ``lhs = sum_s log(1 + ||x_s||^2_{V_{s-1}^{-1}})``
    and ``rhs = log det V_n - log det V_0`` with ``V_0 = lam * I``.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return 0.0, 0.0
    xs = np.atleast_2d(xs)
    state = make_regularized(xs.shape[1], lam)
    logdet0 = state.logdet
    lhs = 0.0
    for x in xs:
        lhs += float(np.log1p(mahalanobis_inv(state, x) ** 2))
        state.update(x)
    return lhs, state.logdet - logdet0


def det_ratio_bound_check(A: CovarianceState, B: CovarianceState, rtol: float = 1e-9) -> tuple[float, float]:
    """Return ``(max Rayleigh quotient of A over B, det A / det B)``.

    Requires ``A >= B``; the first value never exceeds the second.
    """
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    w = sla.eigvalsh(_whitened(A.gram, B))
    if w[0] < 1.0 - rtol * max(1.0, abs(w[-1])):
        raise ValueError(f"precondition A >= B violated (smallest generalized eigenvalue {w[0]:.3g} < 1)")
    return float(w[-1]), float(np.exp(A.logdet - B.logdet))
