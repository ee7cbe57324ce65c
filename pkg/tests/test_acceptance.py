"""Acceptance criteria, each at its stated tolerance.

Every test records a PASS/FAIL line (printed in the terminal summary) and
then asserts.  Instances that the criteria leave open (context size for the
finite-context and coverage runs, seeds) are fixed here; see the README.
"""

import math
import time

import numpy as np
import pytest

from parbandit.confidence import ConfidenceSet, ProblemScales, contains
from parbandit.environments import Environment
from parbandit.linalg import (
    _chol_rank1_inplace,
    elliptical_potential_check,
    mahalanobis_inv,
    make_regularized,
)
from parbandit.metrics import (
    BoundInputs,
    aggregate_trials,
    bound_doubling_arbitrary,
    bound_doubling_finite,
    moving_average,
)
from parbandit.policies import PolicyConfig, PolicyKind, initial_state, observe_batch, select_batch
from parbandit.runner import resolve_config, run_experiment, run_trial, seed_stream

from .conftest import report

pytestmark = pytest.mark.acceptance

LINEAR = ["LinUCB", "LazyLinUCB", "LinTS", "LazyLinTS"]

# cell picked by demos/tune_neural_grid.py on tuning seed 1000 (the test uses seed 11)
NEURAL_TUNED_SCALES = {"lambda": 10.0, "R": 0.01, "S": 0.01}


def test_c01_elliptical_potential_identity():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        xs = rng.standard_normal((200, 10))
        lhs, rhs = elliptical_potential_check(1.0, xs)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 5.0
    report(1, "elliptical potential identity", ok, f"max rel. gap {worst:.2e} (<= 1e-8), {elapsed:.2f}s (< 5s)")
    assert ok


def test_c02_incremental_vs_direct():
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    d = 20
    xs = rng.standard_normal((500, d))
    state = make_regularized(d, 1.0)
    # the Givens sweep used for large d, maintained alongside on the same sequence
    sweep = np.asfortranarray(np.eye(d))
    for x in xs:
        state.update(x)
        _chol_rank1_inplace(sweep, x.copy())
    direct = np.eye(d) + xs.T @ xs
    probes = rng.standard_normal((50, d))
    dense_maha = np.sqrt(np.einsum("ij,jk,ik->i", probes, np.linalg.inv(direct), probes))
    direct_logdet = np.linalg.slogdet(direct)[1]
    errs = {
        "gram": np.linalg.norm(state.gram - direct) / np.linalg.norm(direct),
        "logdet": abs(state.logdet - direct_logdet) / abs(direct_logdet),
        "mahalanobis": float(np.max(np.abs(mahalanobis_inv(state, probes) - dense_maha) / dense_maha)),
        "sweep_gram": np.linalg.norm(sweep @ sweep.T - direct) / np.linalg.norm(direct),
        "sweep_logdet": abs(2 * np.sum(np.log(np.diag(sweep))) - direct_logdet) / abs(direct_logdet),
    }
    elapsed = time.perf_counter() - start
    ok = max(errs.values()) <= 1e-8 and elapsed < 5.0
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items())
    report(2, "incremental vs direct algebra", ok, f"{detail} (<= 1e-8), {elapsed:.2f}s (< 5s)")
    assert ok


def _changing_cfg(lam):
    return resolve_config({
        "environment": {"oracle": "linear", "d": 8, "m": 50, "context": "changing"},
        "total_queries": 2000,
        "parallelism": [20],
        "algorithms": LINEAR,
        "scales": {"lambda": lam, "L": 1.0},
        "dr_routine": "identity",
        "seed": 3,
    })


def test_c03_doubling_bound_arbitrary_contexts():
    cfg = _changing_cfg(1.0)
    bound = bound_doubling_arbitrary(BoundInputs(d=8, T=100, P=20, L=1.0, lam=1.0))
    assert bound == math.ceil(8 / math.log(2) * math.log(1 + 2000 / 8))
    counts = {a.name: [run_trial(cfg, a, 20, k).n_doubling for k in range(100)] for a in cfg.algorithms}
    violations = sum(c > bound for v in counts.values() for c in v)
    worst = max(max(v) for v in counts.values())
    ok = violations == 0
    report(3, "doubling rounds <= uniform bound", ok, f"max count {worst} vs bound {bound}, {violations} violations in 400 runs")
    assert ok


def test_c04_large_regularizer_no_doubling():
    P, L = 20, 1.0
    cfg = _changing_cfg(P * L**2)
    counts = [run_trial(cfg, a, 20, k).n_doubling for a in cfg.algorithms for k in range(100)]
    ok = max(counts) == 0
    report(4, "lambda = P L^2 gives no doubling rounds", ok, f"max count {max(counts)} over {len(counts)} runs")
    assert ok


def _fixed_finite_cfg(**extra):
    raw = {
        "environment": {"oracle": "linear", "d": 10, "m": 30},
        "total_queries": 4800,
        "parallelism": [16],
        "algorithms": LINEAR,
        "seed": 5,
    }
    raw.update(extra)
    return resolve_config(raw)


def test_c05_doubling_bound_finite_context():
    cfg = _fixed_finite_cfg()
    bound = bound_doubling_finite(30, 16)
    assert bound == 120
    counts = [run_trial(cfg, a, 16, k).n_doubling for a in cfg.algorithms for k in range(20)]
    ok = max(counts) <= bound
    report(5, "doubling rounds <= m ceil(log2 P)", ok, f"max count {max(counts)} vs bound {bound} over {len(counts)} runs")
    assert ok


def test_c06_confidence_coverage():
    d, m, T = 10, 50, 500
    scales = ProblemScales(R=1.0, S=1.0, L=1.0, lam=1.0, eps=0.0, delta=0.05)
    policy = PolicyConfig(PolicyKind.LINUCB, scales)
    covered = 0
    for k in range(200):
        env = Environment.linear(d, m, "fixed", seed_stream(6, ["env", k]), noise_std=1.0)
        theta = env.oracle.theta_star
        policy_rng, noise_rng = seed_stream(6, ["policy", k]), seed_stream(6, ["noise", k])
        state = initial_state(policy, d, 1)
        ctx = env.global_context
        inside = True
        for _ in range(T):
            if not contains(ConfidenceSet(state.theta_hat, state.cov_start, state.radius), theta):
                inside = False
                break
            dec = select_batch(policy, state, [ctx.features], policy_rng)
            state = observe_batch(policy, state, dec, [env.noisy(ctx, int(dec.arm_indices[0]), noise_rng)])
        inside &= contains(ConfidenceSet(state.theta_hat, state.cov_start, state.radius), theta)
        covered += bool(inside)
    frac = covered / 200
    ok = frac >= 0.90
    report(6, "confidence coverage", ok, f"theta* inside for all t in {covered}/200 trials = {frac:.3f} (>= 0.90)")
    assert ok


def test_c07_parallel_speedup():
    start = time.perf_counter()
    cfg = resolve_config({
        "environment": {"oracle": "linear", "d": 20, "m": 1000},
        "total_queries": 4000,
        "parallelism": [1, 10],
        "algorithms": ["LinUCB", "LinTS"],
        "trials": 10,
        "seed": 7,
    })
    details, ok = [], True
    tail = slice(3000, 4000)
    for alg in cfg.algorithms:
        curves = {P: aggregate_trials([run_trial(cfg, alg, P, k) for k in range(10)]).mean_cum_regret for P in (1, 10)}
        ratio = curves[10] / curves[1]
        final = ratio[-1]
        lo, hi = ratio[tail].min(), ratio[tail].max()
        good = final <= 2.0 and lo >= 0.5 and hi <= 2.0
        ok &= good
        details.append(f"{alg.name} final P10/P1 {final:.3f}, last-25% range [{lo:.3f}, {hi:.3f}]")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 180
    report(7, "parallel speedup", ok, "; ".join(details) + f"; {elapsed:.0f}s (< 180s)")
    assert ok


def test_c08_doubling_coefficient_study():
    start = time.perf_counter()
    T, P = 3000, 100
    cfg = resolve_config({
        "environment": {"oracle": "linear", "d": 20, "m": 1000},
        "total_queries": T * P,
        "parallelism": [P],
        "algorithms": LINEAR,
        "dr_routine": "identity",
        "seed": 8,
    })
    ok, details = True, []
    decile = T // 10
    for alg in cfg.algorithms:
        alpha = run_trial(cfg, alg, P, 0).alpha_min
        late = alpha[1999:].mean()  # rounds t = 2000..T
        first, last = alpha[:decile].mean(), alpha[-decile:].mean()
        good = last <= first
        if alg.name != "LinUCB":
            good &= late <= 1.15
        ok &= good
        details.append(f"{alg.name} late {late:.4f} first/last decile {first:.3f}/{last:.4f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600
    report(8, "doubling coefficient study", ok, "; ".join(details) + f"; {elapsed:.0f}s (< 600s)")
    assert ok


def test_c09_epsilon_greedy_ordering():
    eps_grid = (0.01, 0.05, 0.1)
    cfg = resolve_config({
        "environment": {"oracle": "linear", "d": 20, "m": 500},
        "total_queries": 4000,
        "parallelism": [1],
        "algorithms": ["LinUCB"] + [{"kind": "EpsilonGreedy", "epsilon": e} for e in eps_grid],
        "seed": 9,
    })
    final = {a.name: np.array([run_trial(cfg, a, 1, k).parallel_regret for k in range(20)]) for a in cfg.algorithms}
    greedy = [n for n in final if n != "LinUCB"]
    best = min(greedy, key=lambda n: final[n].mean())
    wins = float(np.mean(final["LinUCB"] < final[best]))
    ok = wins >= 0.80
    means = ", ".join(f"{n} {final[n].mean():.0f}" for n in final)
    report(9, "LinUCB beats tuned epsilon-greedy", ok, f"wins {wins:.0%} of 20 seeds vs {best} (>= 80%); mean final regret: {means}")
    assert ok


def test_c10_determinism(tmp_path):
    configs = {
        "fixed": _fixed_finite_cfg(trials=2),
        "changing": resolve_config({
            "environment": {"oracle": "linear", "d": 8, "m": 50, "context": "changing"},
            "total_queries": 400, "parallelism": [1, 20], "algorithms": LINEAR, "trials": 2, "seed": 10,
        }),
    }
    identical = []
    for name, cfg in configs.items():
        blobs = []
        for rep, workers in enumerate((1, 2)):
            cfg.output_dir = str(tmp_path / f"{name}{rep}")
            cfg.workers = workers
            run_experiment(cfg)
            blobs.append(tuple((tmp_path / f"{name}{rep}" / f).read_bytes() for f in ("rounds.csv", "aggregate.csv")))
        identical.append(blobs[0] == blobs[1])
    ok = all(identical)
    report(10, "determinism", ok, f"byte-identical rounds/aggregate CSVs across reruns: {dict(zip(configs, identical))}")
    assert ok


def test_c11_misspecified_oracle_regret_decreases():
    cfg = resolve_config({
        "environment": {"oracle": "neural", "features": "quadratic"},
        "total_queries": 3000,
        "parallelism": [10],
        "algorithms": LINEAR,
        "scales": NEURAL_TUNED_SCALES,
        "seed": 11,
    })
    ok, details = True, []
    for alg in cfg.algorithms:
        smooth = moving_average(run_trial(cfg, alg, 10, 0).inst_regret.reshape(-1), 30)
        n = smooth.size // 10
        first, last = smooth[:n].mean(), smooth[-n:].mean()
        ok &= last < first
        details.append(f"{alg.name} {first:.3f} -> {last:.3f}")
    report(11, "misspecified NN oracle regret decreases", ok, "; ".join(details) + f"; scales {NEURAL_TUNED_SCALES}")
    assert ok
