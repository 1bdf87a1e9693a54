"""How many symbols does a block need up front?

The planner picks the smallest n whose binomial arrival tail still
clears the target k + c_extra:  n(1-p) - z*sqrt(n p (1-p)) >= k + c.
"""

from fountainflow.estimator import LossStats
from fountainflow.planner import PlanParams, min_sends_for, plan_initial, plan_topup

params = PlanParams(c_extra=2, z_bin=2.0)
print("initial plan for k=500 (target 502, z_bin=2):")
print(f"{'loss':>6} {'n':>5} {'ratio':>7}")
for p in (0.0, 0.01, 0.03, 0.05, 0.10, 0.20, 0.30):
    n = min_sends_for(502, p, 2.0)
    print(f"{p:>6.2f} {n:>5} {n / 500:>7.3f}")

print("\nthe same planner expressed through estimator state"
      " (mean 5%, sigma 5%):")
stats = LossStats(p_hat=0.05, var_hat=0.0025)
print("  plan_initial(100) =", plan_initial(100, stats, params),
      " (planned at p = 0.05 + 0.05 = 0.10)")

print("\nmid-flight top-up: 400 of 502 reported, 50 still in flight, p=0.1:")
print("  additional =", plan_topup(500, 400, 50, LossStats(p_hat=0.1), params))
print("mid-flight top-up when cover is already sufficient:")
print("  additional =", plan_topup(500, 490, 102, LossStats(), params))
