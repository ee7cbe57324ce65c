"""Regret ledgers and the doubling-round bounds they are checked against."""

# %%
import numpy as np

from parbandit.metrics import (
    BoundInputs,
    aggregate_trials,
    best_regret,
    bound_doubling_arbitrary,
    bound_doubling_finite,
)
from parbandit.runner import resolve_config, run_trial

cfg = resolve_config({
    "environment": {"oracle": "linear", "d": 8, "m": 50},
    "total_queries": 1600,
    "parallelism": [16],
    "algorithms": ["LinUCB", "LazyLinTS"],
    "scales": {"L": 1.0},
    "seed": 4,
})

# %% Bounds for this instance
print("any context sequence:", bound_doubling_arbitrary(BoundInputs(d=8, T=100, P=16)))
print("50 fixed arms       :", bound_doubling_finite(50, 16))

# %% Observed counts and regret
for alg in cfg.algorithms:
    ledgers = [run_trial(cfg, alg, 16, k) for k in range(5)]
    agg = aggregate_trials(ledgers)
    print(
        f"{alg.name:10s} doubling {[lg.n_doubling for lg in ledgers]}"
        f"  final regret {agg.mean_cum_regret[-1]:.1f} +- {agg.std_cum_regret[-1]:.1f}"
        f"  best processor {np.mean([best_regret(lg) for lg in ledgers]):.1f}"
    )
