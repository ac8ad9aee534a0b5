"""
Alloy codes built on Strassen
=============================

One level of Strassen turns a 2x2x2 block product into seven smaller ones.
Each of the seven gets its own group of workers running an inner p-adic code
on a 2x2 partition, so 7 * 4 = 28 workers suffice with high probability where
the entangled polynomial code needs 33.
"""

import numpy as np
from alloycode import alloy
from alloycode.channel import ChannelConfig
from alloycode.decomp import strassen, verify
from alloycode.field import ScalarMode

F = ScalarMode.finite(101)
rng = np.random.default_rng(2)

s = strassen()
print("Strassen terms:", s.r, "|", verify(s, 100, F, rng))
print("(alloy workers, EP threshold) at (4,4,2):", alloy.ep_comparison_point(4, 4, 2))

A = F.random((80, 60), rng)
B = F.random((60, 80), rng)
p = alloy.plan(s, 35, (2, 2), F, rng)
print("group sizes:", p.group_sizes)

result = alloy.run(p, A, B, ChannelConfig(p_f=0.1), rng)
if result.success:
    print("workers kept per group:", result.progress.workers_per_group)
    print("arrivals consumed:", result.progress.arrivals_consumed, "of", p.n)
    print("exact:", np.array_equal(result.product, F.matmul(A, B)))
else:
    print("failed groups:", result.failed_groups)

# decompositions are plain data and round-trip through JSON
print(s.to_dict()["terms"][4])
