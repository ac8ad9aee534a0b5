"""
Exact linear algebra over a prime field
=======================================

Everything the decoders do reduces to rank tests and linear solves, either
over F_q or in floating point.
"""

import numpy as np
from alloycode.field import ScalarMode, independent_rows, rank, solve

F = ScalarMode.finite(101)
rng = np.random.default_rng(0)

# a random 5x5 system and its exact solution
G = F.random((5, 5), rng)
X = F.random((5, 3), rng)
print("rank:", rank(G, F))
print("solve(G, G X) == X:", np.array_equal(solve(G, F.matmul(G, X), F), X))

# a dependent row is skipped when picking a basis in arrival order
H = np.vstack([G[:2], (3 * G[0] + 7 * G[1]) % 101, G[2:]])
print("independent rows in arrival order:", independent_rows(H, F).tolist())

# singular systems come back as None rather than raising
print("singular solve:", solve(np.array([[1, 1], [1, 1]]), np.ones((2, 1)), ScalarMode.finite(2)))
