"""Erasure channel with i.i.d. worker faults and random completion order."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelConfig:
    """Each worker is erased with probability ``p_f``; survivors finish at
    ``shift + Exp(rate)``, which fixes the arrival order."""

    p_f: float = 0.0
    shift: float = 1.0
    rate: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.p_f <= 1.0:
            raise ValueError(f"p_f must lie in [0, 1], got {self.p_f}")
        if self.shift < 0 or self.rate <= 0:
            raise ValueError("latency needs shift >= 0 and rate > 0")


@dataclass
class RoundOutcome:
    erased: np.ndarray
    times: np.ndarray
    order: np.ndarray

    @property
    def n(self) -> int:
        return len(self.erased)

    @property
    def arrivals(self) -> int:
        return len(self.order)


def simulate_round(n: int, config: ChannelConfig, rng: np.random.Generator) -> RoundOutcome:
    """One use of the channel by ``n`` workers.

    Worker ``w`` consumes row ``w`` of a single ``(n, 2)`` uniform draw, so the
    first ``n`` workers behave identically whatever the total worker count.
    """
    if n < 1:
        raise ValueError("need at least one worker")
    u = rng.random((n, 2))
    erased = u[:, 0] < config.p_f
    times = config.shift - np.log1p(-u[:, 1]) / config.rate
    times[erased] = np.inf
    order = np.argsort(times, kind="stable")[: n - int(erased.sum())]
    return RoundOutcome(erased, times, order)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for trial ``trial`` of an experiment seeded with ``seed``."""
    return np.random.default_rng([int(seed), int(trial)])


def rate(x: int, y: int, n: int) -> float:
    """Computational rate ``xy/n`` in units of log(|Y| - 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return x * y / n


def capacity(p_f: float) -> float:
    """Capacity ``1 - p_f`` of the erasure channel in the same units."""
    if not 0.0 <= p_f <= 1.0:
        raise ValueError("p_f must lie in [0, 1]")
    return 1.0 - p_f


def wilson_halfwidth(failures: int, trials: int, z: float = 1.96) -> float:
    if trials == 0:
        return math.inf
    p = failures / trials
    denom = 1 + z * z / trials
    return z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
