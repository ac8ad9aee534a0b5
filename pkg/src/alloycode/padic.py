"""Global random p-adic codes for block matrix multiplication.

Worker ``k`` receives ``A~_k = sum_i gA[k, i] A_i`` and ``B~_k = sum_j gB[k, j] B_j``
and returns ``A~_k B~_k = sum_ij gC[k, (i, j)] A_i B_j`` where
``gC[k, (i, j)] = gA[k, i] * gB[k, j]``.  Coefficients are drawn from the
p-adic law whose l-fold products are uniform on F_q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blocks import col_blocks, row_blocks
from .field import ScalarMode, independent_rows, solve


class NeedMoreRows(Exception):
    """The returned results do not yet determine the product."""

    def __init__(self, have: int, need: int):
        super().__init__(f"rank {have} of {need}; wait for more workers")
        self.have = have
        self.need = need


@dataclass(frozen=True)
class PadicDistribution:
    """Coefficient law on F_q whose ``l``-fold products are uniform."""

    q: int
    l: int = 2

    def __post_init__(self):
        if self.q < 2 or self.l < 1:
            raise ValueError("need q >= 2 and l >= 1")

    @property
    def p_zero(self) -> float:
        return 1.0 - ((self.q - 1) / self.q) ** (1.0 / self.l)

    @property
    def p_nonzero(self) -> float:
        return (self.q * (self.q - 1) ** (self.l - 1)) ** (-1.0 / self.l)

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms on [0, 1) to coefficients.

        ``u < p_zero`` gives 0; otherwise the rescaled remainder picks one of the
        ``q - 1`` nonzero values uniformly.  One uniform per coefficient keeps
        draws prefix-stable when more workers are added.
        """
        p0 = self.p_zero
        u = np.asarray(u, dtype=np.float64)
        w = (u - p0) / (1.0 - p0)
        nz = 1 + np.minimum(np.floor(w * (self.q - 1)), self.q - 2).astype(np.int64)
        return np.where(u < p0, 0, nz).astype(np.int64)

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        return self.from_uniform(rng.random(size))


def sample_coefficient(dist: PadicDistribution, rng: np.random.Generator) -> int:
    return int(dist.sample(rng))


def star_product(G_A: np.ndarray, G_B: np.ndarray, mode: ScalarMode) -> np.ndarray:
    """Row-wise outer product: column ``i*y + j`` of the result is ``G_A[:, i] * G_B[:, j]``."""
    G_A = np.asarray(G_A)
    G_B = np.asarray(G_B)
    n = G_A.shape[0]
    G_C = (G_A[:, :, None] * G_B[:, None, :]).reshape(n, -1)
    return G_C if mode.is_real else np.mod(G_C, mode.q)


@dataclass(frozen=True)
class CodeBook:
    G_A: np.ndarray
    G_B: np.ndarray
    G_C: np.ndarray
    mode: ScalarMode

    @property
    def n(self) -> int:
        return self.G_A.shape[0]

    @property
    def x(self) -> int:
        return self.G_A.shape[1]

    @property
    def y(self) -> int:
        return self.G_B.shape[1]

    def rows(self, workers) -> "CodeBook":
        workers = np.asarray(workers, dtype=np.int64)
        return CodeBook(self.G_A[workers], self.G_B[workers], self.G_C[workers], self.mode)


def coefficient_draws(n: int, width: int, mode: ScalarMode, rng: np.random.Generator) -> np.ndarray:
    """Raw per-worker randomness: one row of ``width`` draws per worker."""
    if mode.is_real:
        return rng.standard_normal((n, width))
    return rng.random((n, width))


def codebook_from_draws(draws: np.ndarray, x: int, y: int, mode: ScalarMode) -> CodeBook:
    if mode.is_real:
        coeffs = np.asarray(draws, dtype=np.float64)
    else:
        coeffs = PadicDistribution(mode.q, 2).from_uniform(draws)
    G_A, G_B = coeffs[:, :x], coeffs[:, x:x + y]
    return CodeBook(G_A, G_B, star_product(G_A, G_B, mode), mode)


def generate_codebook(n: int, x: int, y: int, mode: ScalarMode, rng: np.random.Generator) -> CodeBook:
    """Draw ``G_A`` (n x x) and ``G_B`` (n x y) i.i.d. and form ``G_C``.

    Finite mode uses the p-adic 2-product law; real mode uses standard normals.
    Row ``k`` depends only on the ``k``-th block of draws, so a larger ``n`` with
    the same generator state extends rather than replaces the codebook.
    """
    return codebook_from_draws(coefficient_draws(n, x + y, mode, rng), x, y, mode)


def encode(codebook: CodeBook, A_blocks: np.ndarray, B_blocks: np.ndarray, k: int):
    """Coded task ``(A~_k, B~_k)`` for worker ``k``.

    ``A_blocks`` has shape ``(x, P, R)`` and ``B_blocks`` shape ``(y, R, Q)``.
    """
    if not 0 <= k < codebook.n:
        raise IndexError(f"worker {k} out of range for {codebook.n} workers")
    if len(A_blocks) != codebook.x or len(B_blocks) != codebook.y:
        raise ValueError("block counts do not match the codebook")
    mode = codebook.mode
    return mode.lincomb(codebook.G_A[k], A_blocks), mode.lincomb(codebook.G_B[k], B_blocks)


def encode_all(codebook: CodeBook, A_blocks: np.ndarray, B_blocks: np.ndarray):
    mode = codebook.mode
    At = mode.matmul(codebook.G_A, np.asarray(A_blocks).reshape(codebook.x, -1))
    Bt = mode.matmul(codebook.G_B, np.asarray(B_blocks).reshape(codebook.y, -1))
    return At.reshape((codebook.n,) + A_blocks.shape[1:]), Bt.reshape((codebook.n,) + B_blocks.shape[1:])


def worker_compute(a_tilde: np.ndarray, b_tilde: np.ndarray, mode: ScalarMode) -> np.ndarray:
    return mode.matmul(a_tilde, b_tilde)


def decode_blocks(codebook: CodeBook, returned) -> np.ndarray:
    """Recover the ``(x, y, P, Q)`` family ``A_i B_j`` from worker results.

    ``returned`` is an ordered sequence of ``(worker, result)`` pairs.  Results
    that do not raise the rank are dropped; raises :class:`NeedMoreRows` if
    fewer than ``x*y`` independent rows have arrived.
    """
    returned = list(returned)
    need = codebook.x * codebook.y
    mode = codebook.mode
    if not returned:
        raise NeedMoreRows(0, need)
    workers = np.array([k for k, _ in returned], dtype=np.int64)
    G = codebook.G_C[workers]
    chosen = independent_rows(G, mode, limit=need)
    if len(chosen) < need:
        raise NeedMoreRows(len(chosen), need)
    P, Q = np.shape(returned[0][1])
    rhs = np.stack([np.asarray(returned[i][1]).reshape(-1) for i in chosen])
    X = solve(G[chosen], rhs, mode)
    if X is None:  # pragma: no cover - chosen rows are independent by construction
        raise NeedMoreRows(need - 1, need)
    if not mode.is_real:
        X = X.astype(np.int64)
    return X.reshape(codebook.x, codebook.y, P, Q)


def decode(codebook: CodeBook, returned) -> np.ndarray:
    """Decode worker results straight to the assembled product ``A @ B``."""
    blocks = decode_blocks(codebook, returned)
    x, y, P, Q = blocks.shape
    return blocks.transpose(0, 2, 1, 3).reshape(x * P, y * Q)


def split_for_code(A: np.ndarray, B: np.ndarray, x: int, y: int):
    """Row strips of ``A`` and column strips of ``B`` (the ``A_i``, ``B_j`` of the code)."""
    return row_blocks(A, x), col_blocks(B, y)


def success_probability(q: int, k: int) -> float:
    """``prod_{i=1..k} (1 - q**-i)``: chance a uniform k x k matrix over F_q is invertible."""
    if q < 2 or k < 1:
        raise ValueError("need q >= 2 and k >= 1")
    return math.prod(1.0 - float(q) ** -i for i in range(1, k + 1))


@dataclass
class UniformityReport:
    q: int
    l: int
    samples: int
    frequencies: np.ndarray
    tv_distance: float


def uniformity_report(q: int, l: int, samples: int, rng: np.random.Generator) -> UniformityReport:
    """Total-variation distance between the law of an ``l``-fold product and uniform."""
    if samples < 10_000:
        raise ValueError("uniformity report needs at least 10**4 samples")
    dist = PadicDistribution(q, l)
    prod = np.ones(samples, dtype=np.int64)
    for _ in range(l):
        prod = prod * dist.sample(rng, samples) % q
    freqs = np.bincount(prod, minlength=q) / samples
    tv = 0.5 * float(np.abs(freqs - 1.0 / q).sum())
    return UniformityReport(q, l, samples, freqs, tv)
