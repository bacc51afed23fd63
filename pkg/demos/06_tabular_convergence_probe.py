"""How close does tabular Q-learning actually get to V*?

Two probes, both uniformized MDPs with exact solutions:

1. A 3-state duty-cycle toy where the action only picks the reward stream
   (run pays 1, standby pays 0) and load moves on its own. V* is flat at
   1/(1-gamma) in every state, so the bootstrap target carries no state
   noise and the error should crash toward zero.
2. The full 63-state admission MDP at r_B = 6, where targets do vary across
   states; here the visit-decayed step size leaves a small residual error
   and the right question is the error relative to the value scale.

Runs in under a minute.
"""

import time

import numpy as np

from slicesim.engine import RngStreams
from slicesim.mdp import (build_admission_mdp, build_duty_cycle_mdp,
                          q_learning_values, value_iteration)

toy = build_duty_cycle_mdp()
v_toy, _ = value_iteration(toy, tolerance=1e-12)
print(f"duty-cycle toy: V* = {v_toy[0]:.6f} in every state "
      f"(closed form 1/(1-gamma) = {1 / (1 - toy.discount):.6f})")
for updates in (10_000, 100_000, 1_000_000):
    t0 = time.time()
    vq = q_learning_values(toy, updates, RngStreams(11).get("probe"))
    err = np.abs(vq - v_toy).max()
    print(f"  {updates:>9,} updates: max error {err:.2e}  ({time.time() - t0:.1f}s)")

full = build_admission_mdp(rate_a=10.0, rate_b=12.0, completion_rate=6.0,
                           cap=5, reward_a=2.0, reward_b=6.0)
v_full, _ = value_iteration(full, tolerance=1e-10)
scale = np.abs(v_full).max()
print(f"\nfull admission MDP ({len(full.states)} states), ||V*||_inf = {scale:.2f}")
t0 = time.time()
vq = q_learning_values(full, 1_000_000, RngStreams(12).get("probe"))
err = np.abs(vq - v_full).max()
print(f"  1,000,000 updates: max error {err:.3f} = {100 * err / scale:.1f}% of the "
      f"value scale  ({time.time() - t0:.1f}s)")
