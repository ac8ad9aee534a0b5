"""
The entangled polynomial baseline
=================================

EP codes are MDS: any p*m*n + p - 1 results decode.  Over the reals they
interpolate through a Vandermonde system whose conditioning blows up with
the threshold.
"""

import numpy as np
from alloycode.blocks import BlockPartition, split
from alloycode.ep import EpCode, ep_decode, ep_encode, vandermonde_condition
from alloycode.field import ScalarMode

F = ScalarMode.finite(101)
rng = np.random.default_rng(3)

code = EpCode(4, 4, 2, 40, F)
A = F.random((16, 12), rng)
B = F.random((12, 16), rng)
part = BlockPartition.fit(A, B, 4, 4, 2)
Ag, Bg = split(A, "A", part).blocks, split(B, "B", part).blocks
survivors = rng.permutation(40)[: code.threshold]
C = ep_decode(code, [(int(k), F.matmul(*ep_encode(code, Ag, Bg, int(k)))) for k in survivors])
print("threshold:", code.threshold, "exact:", np.array_equal(C, F.matmul(A, B)))

R = ScalarMode.real()
for m, n, p in ((2, 2, 1), (4, 3, 1), (6, 2, 1), (4, 4, 2)):
    c = EpCode(m, n, p, m * n * p + p - 1, R)
    print(f"shape ({m},{n},{p}): threshold {c.threshold:2d}, Vandermonde condition {vandermonde_condition(c, range(c.workers)):.2e}")
