"""
Numerical stability over the reals
==================================

Random real-valued codes decode through well-conditioned systems, while EP
interpolates at the points 1..N.  Same shapes, same data, exactly threshold
results each.
"""

import statistics

from alloycode.experiments import ExperimentConfig, stability_rows

for x, y in ((6, 2), (4, 3)):
    cfg = ExperimentConfig(schemes=["global-padic", "ep"], x=x, y=y, z=1, P=100, S=100, Q=100,
                           q=None, trials=30, seed=0)
    rows = stability_rows(cfg)
    for scheme in ("global-padic", "ep"):
        med = statistics.median(r[4] for r in rows if r[0] == scheme)
        print(f"({x},{y}) {scheme:13s} median log10 relative error {med:6.2f}")
