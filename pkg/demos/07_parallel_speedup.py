"""Near-linear speed-up: regret at P=10 tracks P=1 when indexed by total queries.

Takes about half a minute on one core.
"""

# %%
import numpy as np

from parbandit.metrics import aggregate_trials
from parbandit.runner import resolve_config, run_trial

cfg = resolve_config({
    "environment": {"oracle": "linear", "d": 20, "m": 1000},
    "total_queries": 4000,
    "parallelism": [1, 10],
    "algorithms": ["LinUCB", "LinTS"],
    "trials": 5,
    "seed": 7,
})

checkpoints = [500, 1000, 2000, 4000]
for alg in cfg.algorithms:
    curves = {P: aggregate_trials([run_trial(cfg, alg, P, k) for k in range(cfg.trials)]).mean_cum_regret
              for P in cfg.parallelism}
    print(alg.name)
    for q in checkpoints:
        r1, r10 = curves[1][q - 1], curves[10][q - 1]
        print(f"  after {q:4d} queries  P=1 {r1:7.1f}   P=10 {r10:7.1f}   ratio {r10 / r1:.3f}")
    # P=10 needs a tenth of the rounds to reach the same total queries
    print(f"  rounds to 4000 queries: P=1 {4000}, P=10 {400}")
