"""Monte Carlo over the erasure channel: decodability, thresholds, rate sweeps.

The simulators here track coefficient rows only; whether the master could
decode depends on which rows arrive, not on the matrix data.  Every trial uses
its own stream ``trial_rng(seed, i)``, split into a codebook stream and a
channel stream, so worker ``w`` sees the same coefficients and the same fate
for every worker count.  Failure frequencies at ``n`` and ``n + 1`` are
therefore paired, and exactly monotone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import alloy
from .channel import ChannelConfig, simulate_round, trial_rng, wilson_halfwidth
from .ep import ep_threshold
from .field import ScalarMode, independent_rows
from .padic import generate_codebook

SCHEMES = ("global-padic", "alloy", "ep")


@dataclass
class TrialOutcome:
    success: bool
    workers_used: int
    sim_time: float


class GlobalPadicScheme:
    name = "global-padic"

    def __init__(self, x: int, y: int, z: int, mode: ScalarMode):
        self.x, self.y, self.z, self.mode = x, y, z, mode

    @property
    def min_workers(self) -> int:
        return self.x * self.y

    def simulate(self, n: int, channel: ChannelConfig, rng: np.random.Generator) -> TrialOutcome:
        code_rng, chan_rng = rng.spawn(2)
        cb = generate_codebook(n, self.x, self.y, self.mode, code_rng)
        out = simulate_round(n, channel, chan_rng)
        need = self.min_workers
        if out.arrivals < need:
            return TrialOutcome(False, out.arrivals, math.inf)
        chosen = independent_rows(cb.G_C[out.order], self.mode, limit=need)
        if len(chosen) < need:
            return TrialOutcome(False, out.arrivals, math.inf)
        last = int(chosen[-1])
        return TrialOutcome(True, last + 1, float(out.times[out.order[last]]))


class AlloyScheme:
    name = "alloy"

    def __init__(self, x: int, y: int, z: int, mode: ScalarMode, decomp=None, inner=None):
        if decomp is None:
            decomp, inner = alloy.alloy_for_shape(x, y, z)
        self.decomp, self.inner, self.mode = decomp, tuple(inner), mode
        self.x, self.y, self.z = x, y, z

    @property
    def min_workers(self) -> int:
        return self.decomp.r * self.inner[0] * self.inner[1]

    def simulate(self, n: int, channel: ChannelConfig, rng: np.random.Generator) -> TrialOutcome:
        code_rng, chan_rng = rng.spawn(2)
        if n < self.decomp.r:
            return TrialOutcome(False, 0, math.inf)
        p = alloy.plan(self.decomp, n, self.inner, self.mode, code_rng)
        prog = alloy.track_arrivals(p, simulate_round(n, channel, chan_rng))
        return TrialOutcome(prog.success, prog.arrivals_consumed, prog.sim_time)


class EpScheme:
    """EP codes are MDS: any ``threshold`` results decode."""

    name = "ep"

    def __init__(self, x: int, y: int, z: int, mode: ScalarMode | None = None):
        self.x, self.y, self.z, self.mode = x, y, z, mode

    @property
    def min_workers(self) -> int:
        return ep_threshold(self.x, self.y, self.z)

    def simulate(self, n: int, channel: ChannelConfig, rng: np.random.Generator) -> TrialOutcome:
        _, chan_rng = rng.spawn(2)
        out = simulate_round(n, channel, chan_rng)
        need = self.min_workers
        if out.arrivals < need:
            return TrialOutcome(False, out.arrivals, math.inf)
        return TrialOutcome(True, need, float(out.times[out.order[need - 1]]))


def make_scheme(name: str, x: int, y: int, z: int, mode: ScalarMode):
    if name == "global-padic":
        return GlobalPadicScheme(x, y, z, mode)
    if name in ("alloy", "alloy-strassen"):
        return AlloyScheme(x, y, z, mode)
    if name == "ep":
        return EpScheme(x, y, z, mode)
    raise ValueError(f"unknown scheme {name!r}; expected one of {SCHEMES}")


def failure_count(scheme, n: int, channel: ChannelConfig, trials: int, seed: int) -> int:
    return sum(not scheme.simulate(n, channel, trial_rng(seed, i)).success for i in range(trials))


@dataclass
class ThresholdEstimate:
    scheme: str
    shape: tuple[int, int, int]
    p_f: float
    epsilon: float
    threshold: int
    trials: int
    ci95: float
    failure_at_threshold: float
    failure_below: float

    @property
    def found(self) -> bool:
        return self.threshold > 0


def estimate_threshold(
    scheme,
    p_f: float,
    epsilon: float,
    trials: int,
    seed: int,
    channel: ChannelConfig | None = None,
) -> ThresholdEstimate:
    """Smallest worker count whose simulated failure frequency is at most ``epsilon``.

    Binary search on ``[min_workers, 64 * min_workers]``; ``threshold == -1``
    when even the upper end fails too often.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    channel = channel or ChannelConfig(p_f)
    if channel.p_f != p_f:
        channel = ChannelConfig(p_f, channel.shift, channel.rate)
    cache: dict[int, int] = {}

    def fails(n: int) -> int:
        if n < scheme.min_workers:
            return trials
        if n not in cache:
            cache[n] = failure_count(scheme, n, channel, trials, seed)
        return cache[n]

    lo, hi = scheme.min_workers, 64 * scheme.min_workers
    shape = (scheme.x, scheme.y, scheme.z)
    if fails(hi) / trials > epsilon:
        f = fails(hi)
        return ThresholdEstimate(scheme.name, shape, p_f, epsilon, -1, trials,
                                 wilson_halfwidth(f, trials), f / trials, f / trials)
    while lo < hi:
        mid = (lo + hi) // 2
        if fails(mid) / trials <= epsilon:
            hi = mid
        else:
            lo = mid + 1
    f = fails(lo)
    return ThresholdEstimate(scheme.name, shape, p_f, epsilon, lo, trials,
                             wilson_halfwidth(f, trials), f / trials, fails(lo - 1) / trials)


@dataclass
class SweepRow:
    size: int
    x: int
    y: int
    n: int
    failures: int
    trials: int

    @property
    def failure_probability(self) -> float:
        return self.failures / self.trials


def achievability_sweep(
    p_f: float,
    rate_fraction: float,
    sizes=(16, 64, 256),
    trials: int = 10_000,
    seed: int = 0,
    q: int = 101,
) -> list[SweepRow]:
    """Failure frequency of global p-adic codes run at ``rate_fraction`` of capacity.

    For each ``x*y`` in ``sizes`` (square partitions) the worker count is
    ``ceil(x*y / (rate_fraction * (1 - p_f)))`` and a trial fails when the
    surviving rows have rank below ``x*y``.  Trial ``i`` shares its seed across
    sizes.
    """
    if rate_fraction <= 0:
        raise ValueError("rate_fraction must be positive")
    mode = ScalarMode.finite(q)
    channel = ChannelConfig(p_f)
    rows = []
    for size in sizes:
        x = math.isqrt(size)
        if x * x != size:
            raise ValueError(f"sweep sizes must be perfect squares, got {size}")
        n = math.ceil(size / (rate_fraction * (1.0 - p_f)) - 1e-9)
        scheme = GlobalPadicScheme(x, x, 1, mode)
        rows.append(SweepRow(size, x, x, n, failure_count(scheme, n, channel, trials, seed), trials))
    return rows
