"""Tabular Q-learning: solves the observable tree, collapses on the
aliased one.

On CT-FO-B1 every state shows a unique class, so the class-keyed table is
an MDP table and converges.  On CT-SU-B1 all three decision states share
one class: goals that need different branches at different forks are
unreachable for a memoryless learner, which is the point of the
surjective mode.
"""

import warnings

import numpy as np

import ctgraph as cg

warnings.filterwarnings("ignore", message="Q-learning")

res = cg.q_learn(cg.preset("CT-FO-B1", seed=0), episodes=8000)
returns = np.array(res.returns)
print("CT-FO-B1 (fully observable), 8000 episodes:")
for window in (500, 2000, 4000, 8000):
    chunk = returns[max(0, window - 1000):window]
    print(f"  episodes {max(0, window - 1000):>4}-{window:<4}: "
          f"mean return {chunk.mean():.3f}")
print(f"  final-100 mean: {cg.final_mean_return(res):.3f}, "
      f"table rows: {len(res.q_table)}\n")

print("CT-SU-B1 (surjective), one run per goal leaf:")
streams = cg.RngStreams.from_seed(1)
for item in cg.make_curriculum(cg.preset("CT-SU-B1"), "reward", 4, streams):
    r = cg.q_learn(item.spec, episodes=4000)
    verdict = "solved" if cg.final_mean_return(r) >= 0.95 else "stuck"
    print(f"  goal {item.task.goal}: final-100 mean "
          f"{cg.final_mean_return(r):.2f} -> {verdict}")
print("\nmixed goals need different actions at identically-observed forks,")
print("so a class-keyed table cannot represent them.")
