"""Step through the smallest interesting graph by hand.

A depth-2 binary tree has 16 states: home, 7 waits, 3 decisions, 4 leaves
and the fail sink.  The optimal oracle reaches its goal leaf in exactly
6 steps when waits never stall (p = 0); any wrong action class ends the
episode immediately.
"""

import ctgraph as cg

spec = cg.preset("CT-FO-B1")
streams = cg.RngStreams.from_seed(spec.seed)
model = cg.build_model(spec, streams)

print(f"graph: b={spec.shape.branching} d={spec.shape.depth} p={spec.shape.wait_prob}")
print(f"states: {cg.count_states(spec.shape)} "
      f"(waits {cg.count_wait_states(spec.shape)}, "
      f"decisions {cg.count_decision_states(spec.shape)}, "
      f"leaves {cg.count_end_states(spec.shape)})")
print(f"goal leaf for seed {spec.seed}: {model.task.goal}\n")

# one perfect episode, printed record by record
transcript = cg.run_episode(cg.optimal_policy(model.task), model, streams)
print("optimal episode:")
print(cg.format_transcripts_csv([transcript]))

# what a single wrong move costs
env = cg.CtGraphEnv(spec)
env.reset()
env.step(0)                      # home -> root wait
_, reward, done, info = env.step(1)  # branch action inside a wait state
print(f"wrong action in a wait state -> {info['state_kind']} "
      f"(reward {reward}, done {done})")

# and the long-delay regime: the same tree with sticky waits
slow = cg.GraphShape(2, 2, 0.9)
print(f"\nwith p=0.9 the same tree stretches episodes to "
      f"{cg.expected_episode_steps(slow):.0f} steps on average,")
print(f"and a random policy scores once every "
      f"{1 / cg.p_reward_random(slow):,.0f} episodes.")
