import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alloycode.channel import ChannelConfig, capacity, rate, simulate_round, trial_rng, wilson_halfwidth
from alloycode.field import ScalarMode
from alloycode.padic import success_probability
from alloycode.simulation import (
    AlloyScheme,
    EpScheme,
    GlobalPadicScheme,
    achievability_sweep,
    estimate_threshold,
    failure_count,
    make_scheme,
)

F101 = ScalarMode.finite(101)


def test_channel_config_validation():
    with pytest.raises(ValueError):
        ChannelConfig(1.5)
    with pytest.raises(ValueError):
        ChannelConfig(0.1, rate=0)
    with pytest.raises(ValueError):
        ChannelConfig(0.1, shift=-1)


@pytest.mark.parametrize("p_f", [0.0, 0.1, 0.5])
def test_erasures_are_binomial(p_f):
    n, rounds = 50, 4000
    rng = np.random.default_rng(1)
    counts = np.array([simulate_round(n, ChannelConfig(p_f), rng).erased.sum() for _ in range(rounds)])
    sd = math.sqrt(n * p_f * (1 - p_f) / rounds)
    assert abs(counts.mean() - n * p_f) <= 3 * sd + 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 60), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_round_invariants(n, p_f, seed):
    out = simulate_round(n, ChannelConfig(p_f, shift=0.5, rate=2.0), np.random.default_rng(seed))
    assert out.n == n
    assert not out.erased[out.order].any()
    assert out.arrivals == n - out.erased.sum()
    assert np.all(np.diff(out.times[out.order]) >= 0)
    assert np.all(out.times[out.order] >= 0.5)


def test_round_reproducible_and_prefix_stable():
    a = simulate_round(20, ChannelConfig(0.3), trial_rng(7, 3))
    b = simulate_round(20, ChannelConfig(0.3), trial_rng(7, 3))
    assert a.erased.tobytes() == b.erased.tobytes()
    assert a.times.tobytes() == b.times.tobytes()
    assert a.order.tobytes() == b.order.tobytes()
    c = simulate_round(30, ChannelConfig(0.3), trial_rng(7, 3))
    assert np.array_equal(c.erased[:20], a.erased)
    assert np.array_equal(c.times[:20], a.times)


def test_rate_capacity():
    assert rate(4, 4, 32) == 0.5
    assert capacity(0.2) == pytest.approx(0.8)
    with pytest.raises(ValueError):
        rate(1, 1, 0)
    with pytest.raises(ValueError):
        capacity(2.0)


def test_wilson_zero_failures_touches_zero():
    # with no failures the Wilson interval's lower end is exactly 0
    n, z = 100, 1.96
    center = (z * z / (2 * n)) / (1 + z * z / n)
    assert wilson_halfwidth(0, n) == pytest.approx(center)
    assert wilson_halfwidth(0, 0) == math.inf


def test_make_scheme():
    assert isinstance(make_scheme("alloy-strassen", 4, 4, 2, F101), AlloyScheme)
    assert isinstance(make_scheme("ep", 4, 4, 2, F101), EpScheme)
    with pytest.raises(ValueError):
        make_scheme("polynomial", 4, 4, 2, F101)


@pytest.mark.parametrize("shape", [(4, 4, 2), (2, 2, 1), (1, 1, 1), (3, 2, 2)])
def test_ep_threshold_deterministic(shape):
    est = estimate_threshold(EpScheme(*shape), 0.0, 0.05, 50, 0)
    m, n, p = shape
    assert est.threshold == p * m * n + p - 1
    assert est.failure_at_threshold == 0.0 and est.failure_below == 1.0


def test_global_threshold_small_shape():
    est = estimate_threshold(GlobalPadicScheme(2, 2, 1, F101), 0.0, 0.05, 500, 0)
    assert est.threshold == 4


def test_threshold_bracket_invariant():
    est = estimate_threshold(GlobalPadicScheme(2, 2, 1, ScalarMode.finite(3)), 0.2, 0.05, 400, 1)
    assert est.found
    assert est.failure_at_threshold <= 0.05 < est.failure_below


def test_not_found():
    est = estimate_threshold(EpScheme(1, 1, 1), 1.0, 0.05, 10, 0)
    assert est.threshold == -1 and not est.found


def test_failure_monotone_in_n_paired():
    s = GlobalPadicScheme(2, 2, 1, ScalarMode.finite(3))
    ch = ChannelConfig(0.3)
    fails = [failure_count(s, n, ch, 300, 5) for n in range(4, 14)]
    assert all(a >= b for a, b in zip(fails, fails[1:]))


def test_alloy_success_at_28_vs_closed_form():
    # closed form assumes uniform 4x4 systems; star-product rows do slightly worse
    f = failure_count(AlloyScheme(4, 4, 2, F101), 28, ChannelConfig(0.0), 1000, 0)
    assert abs(1 - f / 1000 - success_probability(101, 4) ** 7) < 0.03


def test_sweep_rejects_non_square():
    with pytest.raises(ValueError):
        achievability_sweep(0.2, 0.9, (15,), 10)
    with pytest.raises(ValueError):
        achievability_sweep(0.2, 0.0, (16,), 10)


def test_sweep_worker_counts():
    rows = achievability_sweep(0.2, 0.9, (16, 64), 5, 0)
    assert [r.n for r in rows] == [23, 89]
    rows = achievability_sweep(0.0, 1.0, (16,), 5, 0)
    assert rows[0].n == 16
