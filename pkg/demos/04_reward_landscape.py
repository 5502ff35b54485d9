"""Three reward functions over the same eight leaves.

The needle pays only at the goal.  The gradient weighs each wrong branch
by how early it happens (earlier forks cost more), spanning [0, 1] with a
unique peak at the goal.  The stochastic variant draws around the
gradient value, so a few samples near a poor leaf can even be negative.
"""

import itertools

import numpy as np

import ctgraph as cg

shape = cg.GraphShape(2, 3)
streams = cg.RngStreams.from_seed(7)
task = cg.draw_task(shape, streams)
leaves = list(itertools.product((1, 2), repeat=3))

print(f"goal leaf: {task.goal}\n")
print(f"{'leaf':>12} {'needle':>7} {'gradient':>9} {'stochastic (mean of 200)':>26}")
noisy = cg.TaskSpec(goal=task.goal, mode="stochastic", std_r=0.3)
for leaf in leaves:
    needle = cg.needle_reward(task, leaf)
    gradient = cg.gradient_reward(task, leaf, shape)
    draws = [cg.stochastic_reward(noisy, leaf, shape, streams) for _ in range(200)]
    print(f"{str(leaf):>12} {needle:>7.2f} {gradient:>9.3f} "
          f"{np.mean(draws):>10.3f} (min {min(draws):+.2f})")

print("\nhow long until an ideal explorer finds the needle?")
print(f"  {len(leaves)} leaves, so {cg.expected_search_episodes(shape):.1f} episodes "
      f"on average when sampling leaves without repetition;")
res = cg.mc_estimate("search_episodes",
                     cg.preset("CT-FO-B1", seed=3), 10_000,
                     cg.RngStreams.from_seed(3))
print(f"  simulated on the 4-leaf tree: {res.estimate:.3f} "
      f"episodes (closed form 2.5)")
