"""
A global random p-adic code
===========================

A is cut into x row strips and B into y column strips.  Each worker gets one
random combination of each and returns their product.  Any x*y results whose
coefficient rows are independent give back every A_i B_j.
"""

import numpy as np
from alloycode.field import ScalarMode, rank
from alloycode.padic import (
    PadicDistribution, decode, encode_all, generate_codebook, split_for_code,
    success_probability, uniformity_report,
)

F = ScalarMode.finite(101)
rng = np.random.default_rng(1)

# the coefficient law puts extra mass on zero so that products come out uniform
d = PadicDistribution(101, 2)
print(f"P(0) = {d.p_zero:.5f}, P(v) = {d.p_nonzero:.5f} for v != 0")
print("TV distance of a 2-fold product from uniform:", round(uniformity_report(101, 2, 10**6, rng).tv_distance, 5))

A = F.random((40, 30), rng)
B = F.random((30, 40), rng)
x = y = 4
cb = generate_codebook(24, x, y, F, rng)
At, Bt = encode_all(cb, *split_for_code(A, B, x, y))

# workers return in a random order; the decoder keeps only useful results
order = rng.permutation(cb.n)
returned = [(int(k), F.matmul(At[k], Bt[k])) for k in order]
C = decode(cb, returned)
print("decoded product exact:", np.array_equal(C, F.matmul(A, B)))

# how often do the first x*y workers already suffice?
trials = 2000
hits = sum(rank(generate_codebook(16, 4, 4, F, rng).G_C, F) == 16 for _ in range(trials))
print(f"first 16 rows invertible: {hits / trials:.4f} (uniform-matrix value {success_probability(101, 16):.4f})")
