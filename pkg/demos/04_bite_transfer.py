"""Bite transfer: plan a single fork delivery, then compare the three
policies over a handful of sampled user head poses."""

import numpy as np

from sparcs import load_scenario
from sparcs.planning import policy_baseline, policy_fixed, policy_muf_informed
from sparcs.planning.geometry import HeadPose
from sparcs.planning.planner import evaluate_policies, is_valid_success

scenario = load_scenario("natalia_tv_feeding")
scn = scenario.transfer_scenario()

# a single transfer to the user's current pose: first candidate wins, so
# no neck movement is required
result = policy_muf_informed(scn.with_user(HeadPose(0.05, -0.1, 0.0)), rng=0)
print("single transfer:", "ok" if result.success else "failed",
      f"| relative angle {result.relative_angle:.4f} rad",
      f"| {len(result.trajectory)} waypoints")

# a pose the sip cup blocks: the informed policy falls back to a nearby
# attainable pose instead of failing
blocked = policy_muf_informed(scn.with_user(HeadPose(0.0, -0.5, 0.0)), rng=0)
print("blocked pose   :", "ok" if blocked.success else "failed",
      f"| relative angle {blocked.relative_angle:.4f} rad")

# small-scale version of the policy comparison (the experiment runner
# does 100 poses x 10 seeds)
print("\npolicy comparison over 15 poses x 2 seeds:")
rows = evaluate_policies(scn, 15, [0, 1])
for row in rows:
    print(f"  {row['policy']:<12} seed {row['seed']}  "
          f"success {row['success_rate']:.2f}  "
          f"angle {row['mean_rel_angle_rad']:.4f} rad")
