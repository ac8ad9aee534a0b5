"""Prime-field and real arithmetic on numpy arrays.

Finite-mode matrices are ``int64`` arrays with entries in ``[0, q)``; real-mode
matrices are ``float64``.  Elimination over F_q runs in a numba kernel that
stores residues in float64 and reduces with ``x - q*floor(x/q)``, which is exact
while ``q**2 < 2**53``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

MAX_PRIME = 1 << 26
REAL_PIVOT_TOL = 1e-10


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class ScalarMode:
    """Either exact arithmetic in F_q (``q`` prime) or float64 arithmetic (``q=None``)."""

    q: int | None = None

    def __post_init__(self):
        if self.q is not None:
            if not is_prime(self.q):
                raise ValueError(f"field size {self.q} is not prime")
            if self.q >= MAX_PRIME:
                raise ValueError(f"field size must be below 2**26, got {self.q}")

    @classmethod
    def finite(cls, q: int) -> "ScalarMode":
        return cls(int(q))

    @classmethod
    def real(cls) -> "ScalarMode":
        return cls(None)

    @property
    def is_real(self) -> bool:
        return self.q is None

    @property
    def dtype(self):
        return np.float64 if self.is_real else np.int64

    def __str__(self):
        return "Real" if self.is_real else f"F_{self.q}"

    def asarray(self, a) -> np.ndarray:
        """Coerce ``a`` into this mode (reducing mod q when finite)."""
        if self.is_real:
            return np.asarray(a, dtype=np.float64)
        a = np.asarray(a)
        if a.dtype.kind == "f":
            if not np.all(a == np.round(a)):
                raise ValueError("non-integer entries cannot be mapped into a prime field")
            a = a.astype(np.int64)
        return np.mod(a.astype(np.int64, copy=False), self.q)

    def random(self, shape, rng: np.random.Generator) -> np.ndarray:
        """Uniform elements of F_q, or standard normal reals."""
        if self.is_real:
            return rng.standard_normal(shape)
        return rng.integers(0, self.q, size=shape, dtype=np.int64)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.is_real:
            return np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)
        return _matmul_mod(np.asarray(a), np.asarray(b), self.q)

    def lincomb(self, coeffs, blocks: np.ndarray) -> np.ndarray:
        """``sum_i coeffs[i] * blocks[i]`` over the leading axis of ``blocks``."""
        blocks = np.asarray(blocks)
        coeffs = np.asarray(coeffs)
        flat = blocks.reshape(blocks.shape[0], -1)
        out = self.matmul(coeffs[None, :], flat)
        return out.reshape(blocks.shape[1:])

    def add(self, a, b) -> np.ndarray:
        if self.is_real:
            return np.asarray(a) + np.asarray(b)
        return np.mod(np.asarray(a) + np.asarray(b), self.q)

    def sub(self, a, b) -> np.ndarray:
        if self.is_real:
            return np.asarray(a) - np.asarray(b)
        return np.mod(np.asarray(a) - np.asarray(b), self.q)

    def scale(self, c, a) -> np.ndarray:
        if self.is_real:
            return c * np.asarray(a)
        return np.mod(int(c) % self.q * np.asarray(a), self.q)

    def inv(self, a: int) -> int:
        if self.is_real:
            return 1.0 / a
        a = int(a) % self.q
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.q - 2, self.q)


def _matmul_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    # float64 BLAS is exact while every partial sum stays below 2**53
    k = a.shape[-1]
    chunk = max(1, ((1 << 53) - q) // ((q - 1) ** 2 or 1))
    a = a.astype(np.float64)
    b = b.astype(np.float64)
    out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.float64)
    for s in range(0, k, chunk):
        out += a[..., s:s + chunk] @ b[s:s + chunk]
        out = np.fmod(out, q)
    return out.astype(np.int64)


@numba.njit(cache=True, inline="always")
def _reduce(x, q, iq):
    r = x - q * np.floor(x * iq)
    if r >= q:
        r -= q
    elif r < 0.0:
        r += q
    return r


@numba.njit(cache=True)
def _inv_mod(a, q):
    r = 1
    b = a % q
    e = q - 2
    while e > 0:
        if e & 1:
            r = r * b % q
        b = b * b % q
        e >>= 1
    return r


@numba.njit(cache=True)
def _forward_mod(M, q, ncols):
    """In-place row echelon form over F_q with unit pivots.

    Pivots are searched in the first ``ncols`` columns only; row operations
    span the whole row (so trailing columns act as an augmented block).
    Returns the pivot column of each echelon row.
    """
    m, n = M.shape
    iq = 1.0 / q
    pivots = np.empty(min(m, ncols), dtype=np.int64)
    r = 0
    for c in range(ncols):
        if r == m:
            break
        p = -1
        for i in range(r, m):
            if M[i, c] != 0.0:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(c, n):
                t = M[p, j]
                M[p, j] = M[r, j]
                M[r, j] = t
        inv = float(_inv_mod(np.int64(M[r, c]), q))
        for j in range(c, n):
            M[r, j] = _reduce(M[r, j] * inv, q, iq)
        for i in range(r + 1, m):
            f = M[i, c]
            if f != 0.0:
                f = q - f
                for j in range(c, n):
                    M[i, j] = _reduce(M[i, j] + f * M[r, j], q, iq)
        pivots[r] = c
        r += 1
    return pivots[:r]


@numba.njit(cache=True)
def _back_substitute_mod(M, q, nvars):
    """Back substitution on a unit upper-triangular ``[U | rhs]`` system in place."""
    m, n = M.shape
    iq = 1.0 / q
    for c in range(nvars - 1, -1, -1):
        for i in range(c):
            f = M[i, c]
            if f != 0.0:
                f = q - f
                for j in range(nvars, n):
                    M[i, j] = _reduce(M[i, j] + f * M[c, j], q, iq)
                M[i, c] = 0.0


def _forward_real(M: np.ndarray, ncols: int) -> list[int]:
    m = M.shape[0]
    pivots = []
    r = 0
    biggest = 0.0
    for c in range(ncols):
        if r == m:
            break
        col = np.abs(M[r:, c])
        p = int(np.argmax(col))
        piv = col[p]
        if piv == 0.0 or piv <= REAL_PIVOT_TOL * biggest:
            M[r:, c] = 0.0
            continue
        biggest = max(biggest, piv)
        p += r
        if p != r:
            M[[r, p]] = M[[p, r]]
        factors = M[r + 1:, c] / M[r, c]
        M[r + 1:, c:] -= np.outer(factors, M[r, c:])
        pivots.append(c)
        r += 1
    return pivots


def _forward(M: np.ndarray, mode: ScalarMode, ncols: int):
    """Row-reduce a private float64 copy of ``M``; return ``(work, pivots)``."""
    work = np.array(M, dtype=np.float64, copy=True)
    if work.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if mode.is_real:
        pivots = np.asarray(_forward_real(work, ncols), dtype=np.int64)
    else:
        pivots = _forward_mod(work, mode.q, ncols)
    return work, pivots


def rank(G, mode: ScalarMode) -> int:
    """Row rank by elimination."""
    G = np.asarray(G)
    if G.size == 0:
        return 0
    _, pivots = _forward(G, mode, G.shape[1])
    return len(pivots)


def independent_rows(G, mode: ScalarMode, limit: int | None = None) -> np.ndarray:
    """Indices of the rows that raise the rank when scanned top to bottom.

    This is the greedy basis a decoder builds while results arrive in row order.
    Stops after ``limit`` rows have been selected.
    """
    G = np.asarray(G)
    if G.size == 0:
        return np.zeros(0, dtype=np.int64)
    _, pivots = _forward(G.T, mode, G.shape[0])
    pivots = np.asarray(pivots, dtype=np.int64)
    return pivots[:limit] if limit is not None else pivots


def solve(G, rhs, mode: ScalarMode) -> np.ndarray | None:
    """Solve ``G @ X = rhs`` for square ``G``.

    Returns ``None`` when ``G`` is singular (rank deficient, or in real mode a
    pivot falls below ``1e-10`` of the largest pivot seen).
    """
    G = np.asarray(G)
    rhs = np.asarray(rhs)
    n = G.shape[0]
    if G.ndim != 2 or G.shape[1] != n:
        raise ValueError(f"solve needs a square matrix, got {G.shape}")
    vector = rhs.ndim == 1
    if vector:
        rhs = rhs[:, None]
    if rhs.shape[0] != n:
        raise ValueError(f"rhs has {rhs.shape[0]} rows, expected {n}")
    aug = np.hstack([np.asarray(G, dtype=np.float64), np.asarray(rhs, dtype=np.float64)])
    work, pivots = _forward(aug, mode, n)
    if len(pivots) < n:
        return None
    if mode.is_real:
        X = work[:, n:]
        U = work[:, :n]
        for c in range(n - 1, -1, -1):
            X[c] /= U[c, c]
            X[:c] -= np.outer(U[:c, c], X[c])
        out = X
    else:
        _back_substitute_mod(work, mode.q, n)
        out = work[:, n:].astype(np.int64)
    return out[:, 0] if vector else out


def inverse(G, mode: ScalarMode) -> np.ndarray | None:
    G = np.asarray(G)
    return solve(G, np.eye(G.shape[0], dtype=mode.dtype), mode)
