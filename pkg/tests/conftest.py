import itertools

import numpy as np
import pytest

from alloycode.field import ScalarMode


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def F101():
    return ScalarMode.finite(101)


def brute_rank(rows, q):
    """Rank over F_q as log_q of the size of the row span, by enumeration."""
    rows = [tuple(int(v) % q for v in r) for r in rows]
    if not rows:
        return 0
    span = set()
    for coeffs in itertools.product(range(q), repeat=len(rows)):
        span.add(tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) % q for j in range(len(rows[0]))))
    size, k = len(span), 0
    while q ** k < size:
        k += 1
    return k
