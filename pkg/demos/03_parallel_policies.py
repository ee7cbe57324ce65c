"""One batch round by hand: P processors pick arms before any reward arrives.

The eager variants fold each pending arm into the covariance before the next
processor chooses.  The lazy variants score every processor against the
round-start covariance with an inflated radius.  Either way the round is a
doubling round when the batch's covariance exceeds twice the round-start one.
"""

# %%
import numpy as np

from parbandit.environments import Environment
from parbandit.policies import PolicyConfig, PolicyKind, initial_state, observe_batch, select_batch
from parbandit.confidence import ProblemScales

rng = np.random.default_rng(2)
env = Environment.linear(d=8, m=100, mode="fixed", rng=rng)
ctx = env.global_context
P = 6

for kind in (PolicyKind.LINUCB, PolicyKind.LAZY_LINUCB, PolicyKind.LINTS, PolicyKind.LAZY_LINTS):
    policy = PolicyConfig(kind, ProblemScales())
    state = initial_state(policy, 8, P)
    doubling = 0
    for t in range(30):
        dec = select_batch(policy, state, [ctx.features] * P, rng)
        rewards = [env.noisy(ctx, int(i), rng) for i in dec.arm_indices]
        doubling += dec.is_doubling_round
        state = observe_batch(policy, state, dec, rewards)
    last = ctx.values[dec.arm_indices]
    print(f"{kind.value:11s} doubling rounds {doubling:2d}/30, last batch regret {np.mean(ctx.best_value - last):.3f}")

# %% A large ridge makes every round non-doubling: lambda >= P L^2
policy = PolicyConfig(PolicyKind.LINUCB, ProblemScales(lam=P * 1.0))
state = initial_state(policy, 8, P)
flags = []
for t in range(30):
    dec = select_batch(policy, state, [ctx.features] * P, rng)
    flags.append(dec.is_doubling_round)
    state = observe_batch(policy, state, dec, [env.noisy(ctx, int(i), rng) for i in dec.arm_indices])
print("doubling rounds with lambda = P:", sum(flags))
