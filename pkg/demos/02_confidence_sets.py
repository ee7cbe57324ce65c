"""Ridge estimates, confidence ellipsoids and the UCB / Thompson rules."""

# %%
import numpy as np

from parbandit.confidence import (
    ConfidenceSet,
    ProblemScales,
    RegressionSums,
    beta_radius,
    contains,
    ridge_estimate,
    ts_sample,
    ucb_scores,
)

rng = np.random.default_rng(1)
d, n = 5, 300
theta_star = rng.standard_normal(d)
theta_star /= np.linalg.norm(theta_star)
xs = rng.standard_normal((n, d)) / np.sqrt(d)
rewards = xs @ theta_star + rng.standard_normal(n)

scales = ProblemScales(R=1.0, S=1.0, L=1.0, lam=1.0, delta=0.05)
sums = RegressionSums.empty(d, scales.lam).add(xs, rewards)
theta_hat = ridge_estimate(sums)
radius = beta_radius(scales, sums.cov, t=n + 1, P=1)
cset = ConfidenceSet(theta_hat, sums.cov, radius)

print("estimation error:", np.linalg.norm(theta_hat - theta_star))
print("radius sqrt(beta):", radius)
print("theta* inside the ellipsoid:", contains(cset, theta_star))

# %% The radius grows only logarithmically in the data
for m in (10, 100, 1000):
    s = RegressionSums.empty(d, 1.0).add(rng.standard_normal((m, d)) / np.sqrt(d), np.zeros(m))
    print(f"n={m:5d}  radius={beta_radius(scales, s.cov, m + 1, 1):.3f}")

# %% Optimism and posterior sampling on a small arm set
arms = rng.standard_normal((8, d)) / np.sqrt(d)
print("UCB scores  :", np.round(ucb_scores(arms, cset), 3))
print("true values :", np.round(arms @ theta_star, 3))
draws = np.array([ts_sample(cset, rng.standard_normal(d)) for _ in range(2000)])
print("TS draws centred on theta_hat:", np.allclose(draws.mean(axis=0), theta_hat, atol=0.05))
