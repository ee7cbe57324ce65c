"""Covariance bookkeeping behind every policy.

Run with ``python3 demos/01_covariance_algebra.py``.
"""

# %% A regularized covariance and a few rank-one updates
import numpy as np

from parbandit.linalg import (
    elliptical_potential_check,
    mahalanobis_inv,
    make_regularized,
    min_doubling_coefficient,
    psd_dominates,
)

rng = np.random.default_rng(0)
d = 6
state = make_regularized(d, lam=1.0)
xs = rng.standard_normal((40, d))
for x in xs:
    state.update(x)

dense = np.eye(d) + xs.T @ xs
print("log det, incremental vs dense:", state.logdet, np.linalg.slogdet(dense)[1])
probe = rng.standard_normal(d)
print("||x||_{V^-1}:", mahalanobis_inv(state, probe), np.sqrt(probe @ np.linalg.solve(dense, probe)))

# %% Elliptical potential: summed log(1 + ||x||^2) telescopes into a log-det ratio
lhs, rhs = elliptical_potential_check(1.0, rng.standard_normal((200, 10)))
print(f"potential sum {lhs:.12f}  log-det ratio {rhs:.12f}")

# %% Loewner-order test and the doubling coefficient
# Adding a batch of arms inflates V; alpha_min is the smallest alpha with V_aug <= alpha V.
batch = rng.standard_normal((8, d)) * 3
augmented = state.gram + batch.T @ batch
alpha = min_doubling_coefficient(state, augmented)
print("alpha_min =", alpha)
print("dominated at c=2:", psd_dominates(augmented, state, c=2.0).dominated)
print("dominated at c=alpha*1.01:", psd_dominates(augmented, state, c=alpha * 1.01).dominated)
