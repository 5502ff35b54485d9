"""Reproduce the reward-probability table and check one row by simulation.

Every quantity below is closed form: the chance a random policy survives
to the rewarding leaf, the chance it reaches any leaf, the goal rate of a
never-failing navigator, and the state counts.  The Monte Carlo column
re-derives one of them mechanically from a million simulated episodes.
"""

import ctgraph as cg

CONFIGS = [
    (2, 1, 0.0),
    (2, 2, 0.9),
    (3, 2, 0.9),
    (2, 4, 0.9),
    (3, 10, 0.9),
    (2, 16, 0.5),
]

print(f"{'b':>2} {'d':>3} {'p':>4} | {'P_reward_random':>15} {'P_any_end':>12} "
      f"{'P_nav':>12} {'states':>7} {'ends':>6}")
for b, d, p in CONFIGS:
    shape = cg.GraphShape(b, d, p)
    a = cg.analyze_shape(shape)
    print(f"{b:>2} {d:>3} {p:>4.1f} | {a.p_reward_random:>15.3e} "
          f"{a.p_any_end:>12.3e} {a.p_reward_navigation:>12.3e} "
          f"{a.n_states:>7} {a.n_end_states:>6}")

# the closed form and an explicit sum over episode lengths agree
shape = cg.GraphShape(2, 2, 0.9)
closed = cg.p_reward_random(shape)
summed = cg.p_reward_random_series(shape)
print(f"\nclosed form {closed:.12e}")
print(f"series sum  {summed:.12e}  (relative gap {abs(closed - summed) / closed:.1e})")

# now let a million random-policy episodes vote
spec = cg.preset("CT-POSR-B1", seed=42)
res = cg.mc_estimate("p_reward_random", spec, 1_000_000, cg.RngStreams.from_seed(42))
ref = cg.p_reward_random(spec.shape)
print(f"\nCT-POSR-B1, 1e6 episodes: estimate {res.estimate:.3e} "
      f"vs closed form {ref:.3e} (z = {res.z_score(ref):+.2f}, "
      f"{res.steps_per_second:,.0f} steps/s)")
