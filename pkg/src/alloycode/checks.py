"""Self-checks run by ``alloycode verify``.

Each check compares an observed quantity against an independently computed
expectation and records both.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import alloy, decomp as dc
from .blocks import BlockPartition, split
from .channel import ChannelConfig
from .ep import EpCode, ep_decode, ep_encode
from .field import ScalarMode, rank
from .padic import (
    PadicDistribution,
    decode,
    encode_all,
    generate_codebook,
    split_for_code,
    success_probability,
    uniformity_report,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    observed: float | str
    expected: float | str

    def __str__(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: observed {self.observed}, expected {self.expected}"


def _rank_py(rows, q: int) -> int:
    M = [list(r) for r in rows]
    r = 0
    for c in range(len(M[0]) if M else 0):
        p = next((i for i in range(r, len(M)) if M[i][c] % q), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = pow(M[r][c], q - 2, q)
        M[r] = [v * inv % q for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % q for a, b in zip(M[i], M[r])]
        r += 1
    return r


def enumerate_invertibility(q: int, x: int, y: int) -> float:
    """Exact chance that ``x*y`` star-product rows span F_q^(xy), by enumeration.

    Builds the law of one row ``a (x) b`` with p-adic ``a``, ``b`` and sums the
    probability of every invertible tuple of rows.  Feasible only for tiny
    ``q``, ``x``, ``y``.
    """
    dist = PadicDistribution(q, 2)
    pz = lambda v: dist.p_zero if v == 0 else dist.p_nonzero  # noqa: E731
    law: dict[tuple, float] = {}
    for a in itertools.product(range(q), repeat=x):
        pa = math.prod(pz(v) for v in a)
        for b in itertools.product(range(q), repeat=y):
            row = tuple(ai * bj % q for ai in a for bj in b)
            law[row] = law.get(row, 0.0) + pa * math.prod(pz(v) for v in b)
    items = list(law.items())
    k = x * y
    total = 0.0
    for combo in itertools.product(items, repeat=k):
        if _rank_py([r for r, _ in combo], q) == k:
            total += math.prod(p for _, p in combo)
    return total


def codebook_invertibility(q: int, x: int, y: int, trials: int, rng: np.random.Generator) -> float:
    mode = ScalarMode.finite(q)
    k = x * y
    hits = sum(rank(generate_codebook(k, x, y, mode, rng).G_C, mode) == k for _ in range(trials))
    return hits / trials


def uniform_invertibility(q: int, k: int, trials: int, rng: np.random.Generator) -> float:
    mode = ScalarMode.finite(q)
    return sum(rank(mode.random((k, k), rng), mode) == k for _ in range(trials)) / trials


def _within(obs: float, exp: float, trials: int, sigmas: float = 3.0) -> bool:
    se = math.sqrt(max(exp * (1 - exp), 1e-12) / trials)
    return abs(obs - exp) <= sigmas * se


def run_all(seed: int = 0, decomp_path: str | None = None) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out: list[CheckResult] = []
    F = ScalarMode.finite(101)
    R = ScalarMode.real()

    trials = 20_000
    for q in (2, 7):
        exp = success_probability(q, 4)
        obs = uniform_invertibility(q, 4, trials, rng)
        out.append(CheckResult(f"uniform 4x4 invertibility over F_{q} vs closed form",
                               _within(obs, exp, trials), round(obs, 4), round(exp, 4)))

    exact = enumerate_invertibility(2, 2, 2)
    obs = codebook_invertibility(2, 2, 2, trials, rng)
    out.append(CheckResult("codebook G_C invertibility over F_2 (x=y=2) vs enumeration",
                           _within(obs, exact, trials), round(obs, 4), round(exact, 4)))
    bound = (1 - 1 / 2) ** 4
    out.append(CheckResult("codebook invertibility over F_2 above (1-1/q)^xy", obs > bound, round(obs, 4), f"> {bound}"))

    for q in (2, 5, 11):
        for l in (2, 3):
            rep = uniformity_report(q, l, 200_000, rng)
            out.append(CheckResult(f"{l}-product uniformity over F_{q} (TV)", rep.tv_distance < 0.01,
                                   round(rep.tv_distance, 5), "< 0.01"))

    for mode, label in ((F, "F_101"), (R, "Real")):
        res = dc.verify(dc.strassen(), 100, mode, rng, block_size=4 if mode is F else 64)
        out.append(CheckResult(f"Strassen identity ({label})", res.passed, str(res), "100/100"))
    if decomp_path:
        d = dc.TensorDecomposition.load(decomp_path)
        res = dc.verify(d, 100, F, rng)
        out.append(CheckResult(f"decomposition {decomp_path}", res.passed, str(res), "100/100"))

    A = F.random((8, 6), rng)
    B = F.random((6, 8), rng)
    C = F.matmul(A, B)
    cb = generate_codebook(24, 4, 4, F, rng)
    At, Bt = encode_all(cb, *split_for_code(A, B, 4, 4))
    got = decode(cb, [(k, F.matmul(At[k], Bt[k])) for k in range(cb.n)])
    out.append(CheckResult("global p-adic decode == A @ B", bool(np.array_equal(got, C)), "exact" if np.array_equal(got, C) else "mismatch", "exact"))

    p = alloy.plan(dc.strassen(), 42, (2, 2), F, rng)
    run = alloy.run(p, A, B, ChannelConfig(0.0), rng)
    ok = run.success and np.array_equal(run.product, C)
    out.append(CheckResult("alloy-Strassen decode == A @ B", ok, "exact" if ok else "mismatch", "exact"))

    code = EpCode(4, 4, 2, 33, F)
    part = BlockPartition.fit(A, B, 4, 4, 2)
    Ag, Bg = split(A, "A", part).blocks, split(B, "B", part).blocks
    got = ep_decode(code, [(k, F.matmul(*ep_encode(code, Ag, Bg, k))) for k in range(33)])
    out.append(CheckResult("EP decode == A @ B", bool(np.array_equal(got, C)), "exact" if np.array_equal(got, C) else "mismatch", "exact"))
    return out
