"""The constant schedule and its admissible window for s.

For each t in (19/20, 1) the admissible s form the interval
(3/(4t), (5t-4)/t), which closes up as t decreases to 19/20.  We print the
constants for the cat map and watch the Delta lower bound (t-st)/(1-st).
"""

from __future__ import annotations

from plisskit import SchedulerInput, TTooSmall, arnold_cat, estimate_bounds, delta_lower_bound
from plisskit import s_interval, schedule_constants

bounds = estimate_bounds(arnold_cat())
print(f"cat map: alpha = {bounds.alpha:.10f}  beta = {bounds.beta:.10f}")

print(f"\n{'t':>8} {'s range':>20} {'s':>8} {'sigma':>8} {'eta':>8} {'bound':>8}")
for t in (0.951, 0.96, 0.97, 0.98, 0.99):
    lo, hi = s_interval(t)
    c = schedule_constants(SchedulerInput(t, None, bounds))
    print(f"{t:8.3f} ({lo:.5f}, {hi:.5f}) {c.s:8.5f} {c.sigma:8.5f} {c.eta:8.5f} "
          f"{delta_lower_bound(t, c.s):8.5f}")

c = schedule_constants(SchedulerInput(0.96, None, bounds))
print("\nt = 0.96 in full:")
for key, value in c.to_dict(64).items():
    print(f"  {key:9s} {value}")
print("  side ratios", [round(r, 5) for r in c.side_ratios()], "must exceed sigma =", round(c.sigma, 5))

try:
    schedule_constants(SchedulerInput(0.95, None, bounds))
except TTooSmall as exc:
    print("\nt = 0.95:", exc)
