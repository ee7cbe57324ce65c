"""Reward oracles: linear, a fixed random network, and a table read from CSV."""

# %%
import tempfile
from pathlib import Path

import numpy as np

from parbandit.environments import (
    Environment,
    expand_features,
    load_tabular_csv,
    make_superconductor_like,
    write_tabular_csv,
)

rng = np.random.default_rng(3)

# %% Linear oracle, fresh arms for every (t, p)
env = Environment.linear(d=4, m=5, mode="changing", rng=rng)
a, b = env.context(1, 1, rng), env.context(1, 2, rng)
print("changing contexts differ:", not np.array_equal(a.features, b.features))

# %% Neural oracle over all 14-bit strings, quadratic features
nn_env = Environment.neural(rng, features="quadratic")
ctx = nn_env.global_context
print("arms:", ctx.features.shape, " value range:", ctx.values.min().round(3), ctx.values.max().round(3))
print("quadratic features of 101:", expand_features(np.array([1.0, 0.0, 1.0]), "quadratic"))

# %% Tabular data round-trips through CSV
table = make_superconductor_like(m=200, d=5, rng=rng)
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "table.csv"
    write_tabular_csv(table, path)
    print(path.read_text().splitlines()[0])
    back = load_tabular_csv(path, value_column=table.value_name, noise_std=table.noise_std)
print("lossless:", np.array_equal(back.arms, table.arms) and np.array_equal(back.values, table.values))
tab_env = Environment.tabular(back)
print("best arm value:", tab_env.global_context.best_value)
