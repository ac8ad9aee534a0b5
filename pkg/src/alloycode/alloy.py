"""Locally random p-adic alloy codes.

An outer bilinear decomposition with ``r`` terms splits the job into ``r``
independent sub-products.  Each sub-product ``E_A(A) @ E_B(B)`` is protected by
its own inner p-adic code over an ``x' x y'`` partition, served by its own
group of workers.  The master decodes each group as soon as its returned
coefficient rows reach rank ``x'*y'`` and recombines the terms with the
decomposition's output maps.

Worker ``w`` belongs to group ``w % r`` and is the ``w // r``-th member there, so
group sizes are ``n // r`` with the remainder going to the first groups.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blocks import BlockPartition, assemble, col_blocks, row_blocks, split
from .channel import ChannelConfig, RoundOutcome, simulate_round
from .decomp import TensorDecomposition, strassen, trivial
from .ep import ep_threshold
from .field import ScalarMode, independent_rows
from .padic import CodeBook, codebook_from_draws, coefficient_draws, decode


@dataclass
class AlloyPlan:
    decomp: TensorDecomposition
    inner: tuple[int, int]
    n: int
    mode: ScalarMode
    codebooks: list[CodeBook]

    @property
    def r(self) -> int:
        return self.decomp.r

    @property
    def rows_needed(self) -> int:
        return self.inner[0] * self.inner[1]

    @property
    def group_sizes(self) -> list[int]:
        return [cb.n for cb in self.codebooks]

    def group_of(self, worker: int) -> tuple[int, int]:
        return worker % self.r, worker // self.r

    def workers_of(self, t: int) -> range:
        return range(t, self.n, self.r)

    @property
    def shape(self) -> tuple[int, int, int]:
        """Overall block partition ``(x, y, z)`` served by this plan."""
        return self.decomp.a * self.inner[0], self.decomp.b * self.inner[1], self.decomp.c


def plan(
    decomp: TensorDecomposition,
    n: int,
    inner: tuple[int, int],
    mode: ScalarMode,
    rng: np.random.Generator,
) -> AlloyPlan:
    """Draw the ``r`` inner codebooks for ``n`` workers."""
    r = decomp.r
    if n < r:
        raise ValueError(f"{n} workers cannot cover {r} groups")
    xi, yi = inner
    draws = coefficient_draws(n, xi + yi, mode, rng)
    books = [codebook_from_draws(draws[t::r], xi, yi, mode) for t in range(r)]
    return AlloyPlan(decomp, (xi, yi), n, mode, books)


def alloy_for_shape(x: int, y: int, z: int) -> tuple[TensorDecomposition, tuple[int, int]]:
    """Default outer decomposition and inner partition for an ``(x, y, z)`` job.

    Strassen when ``z == 2`` and ``x``, ``y`` are even; otherwise one trivial
    term per inner-dimension block, each inner-coded over the full ``x x y``.
    """
    if z == 2 and x % 2 == 0 and y % 2 == 0:
        return strassen(), (x // 2, y // 2)
    return trivial(1, 1, z), (x, y)


@dataclass
class WorkerTask:
    worker: int
    t: int
    k: int
    a_tilde: np.ndarray
    b_tilde: np.ndarray


def _images(p: AlloyPlan, A: np.ndarray, B: np.ndarray):
    d = p.decomp
    xi, yi = p.inner
    part = BlockPartition.fit(A, B, *p.shape)
    sup = BlockPartition(d.a, d.b, d.c, xi * part.P, part.S, yi * part.Q)
    Ag = split(p.mode.asarray(A), "A", sup).blocks
    Bg = split(p.mode.asarray(B), "B", sup).blocks
    out = []
    for t in range(p.r):
        ea, eb = d.images(Ag, Bg, p.mode, t)
        out.append((row_blocks(ea, xi), col_blocks(eb, yi)))
    return out


def encode_tasks(p: AlloyPlan, A: np.ndarray, B: np.ndarray) -> list[WorkerTask]:
    """Coded inputs for every worker, ordered by worker id."""
    images = _images(p, A, B)
    mode = p.mode
    tasks = []
    for w in range(p.n):
        t, k = p.group_of(w)
        cb = p.codebooks[t]
        a_blocks, b_blocks = images[t]
        tasks.append(WorkerTask(w, t, k, mode.lincomb(cb.G_A[k], a_blocks), mode.lincomb(cb.G_B[k], b_blocks)))
    return tasks


@dataclass
class GroupResult:
    t: int
    used: list[int] = field(default_factory=list)
    decoded: bool = False
    value: np.ndarray | None = None


@dataclass
class Progress:
    """Arrival bookkeeping: which results each group keeps and when it finished."""

    success: bool
    arrivals_consumed: int
    sim_time: float
    groups: list[GroupResult]

    @property
    def failed_groups(self) -> list[int]:
        return [g.t for g in self.groups if not g.decoded]

    @property
    def workers_per_group(self) -> list[int]:
        return [len(g.used) for g in self.groups]


def track_arrivals(p: AlloyPlan, outcome: RoundOutcome) -> Progress:
    """Feed arrivals to the groups until every group reaches full rank.

    A result that does not raise its group's rank is discarded.  Groups are
    checked independently, so arrival order inside one group never affects
    another.
    """
    need = p.rows_needed
    groups = [GroupResult(t) for t in range(p.r)]
    rows: list[list[np.ndarray]] = [[] for _ in range(p.r)]
    pending = p.r
    consumed, when = 0, np.inf
    for w in outcome.order:
        consumed += 1
        t, k = p.group_of(int(w))
        g = groups[t]
        if g.decoded:
            continue
        cand = rows[t] + [p.codebooks[t].G_C[k]]
        if len(independent_rows(np.stack(cand), p.mode)) > len(rows[t]):
            rows[t] = cand
            g.used.append(k)
            if len(g.used) == need:
                g.decoded = True
                pending -= 1
                if pending == 0:
                    when = float(outcome.times[w])
                    break
    return Progress(pending == 0, consumed if pending == 0 else outcome.arrivals, when, groups)


@dataclass
class AlloyRun:
    success: bool
    product: np.ndarray | None
    progress: Progress

    @property
    def failed_groups(self) -> list[int]:
        return self.progress.failed_groups


def run(
    p: AlloyPlan,
    A: np.ndarray,
    B: np.ndarray,
    channel: ChannelConfig,
    rng: np.random.Generator,
    outcome: RoundOutcome | None = None,
) -> AlloyRun:
    """Simulate one round end to end and return ``A @ B`` on success.

    Only the results each group keeps are actually computed.  A group that runs
    out of workers below full rank makes the whole run fail; there is no retry.
    """
    if outcome is None:
        outcome = simulate_round(p.n, channel, rng)
    progress = track_arrivals(p, outcome)
    if not progress.success:
        return AlloyRun(False, None, progress)
    images = _images(p, A, B)
    mode = p.mode
    products = []
    for g in progress.groups:
        cb = p.codebooks[g.t]
        a_blocks, b_blocks = images[g.t]
        returned = []
        for k in g.used:
            at = mode.lincomb(cb.G_A[k], a_blocks)
            bt = mode.lincomb(cb.G_B[k], b_blocks)
            returned.append((k, mode.matmul(at, bt)))
        g.value = decode(cb, returned)
        products.append(g.value)
    C = assemble(p.decomp.recombine(products, mode))
    return AlloyRun(True, C, progress)


def ep_comparison_point(x: int, y: int, z: int) -> tuple[int, int]:
    """``(workers the alloy code needs with no faults, EP recovery threshold)``."""
    decomp, (xi, yi) = alloy_for_shape(x, y, z)
    return decomp.r * xi * yi, ep_threshold(x, y, z)
