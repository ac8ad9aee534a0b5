"""
Recovery thresholds and rates near capacity
===========================================

Workers fail independently with probability p_f.  The typical recovery
threshold is the smallest worker count whose failure rate is below epsilon.
Running a p-adic code at a fixed fraction of capacity 1 - p_f shows failure
falling with size below capacity and rising above it.
"""

from alloycode.field import ScalarMode
from alloycode.simulation import achievability_sweep, estimate_threshold, make_scheme

F = ScalarMode.finite(101)
for name in ("global-padic", "alloy", "ep"):
    for p_f in (0.0, 0.1):
        est = estimate_threshold(make_scheme(name, 4, 4, 2, F), p_f, 0.05, 500, seed=0)
        print(f"{name:13s} p_f={p_f}: threshold {est.threshold} (95% half-width {est.ci95:.3f})")

for frac in (0.9, 1.2):
    rows = achievability_sweep(0.2, frac, sizes=(16, 64), trials=1000, seed=0)
    print(f"rate = {frac} x capacity:", [(r.size, r.n, r.failure_probability) for r in rows])
