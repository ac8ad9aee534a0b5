"""Entangled polynomial (EP) codes, the deterministic MDS baseline.

With ``A`` cut into ``m x p`` blocks and ``B`` into ``p x n`` blocks, worker ``k``
evaluates

    A~(a) = sum_{i,s} A_is a^(s + p*i)
    B~(a) = sum_{s,j} B_sj a^(p-1-s + p*m*j)

at its point ``a``.  The product polynomial has degree ``p*m*n + p - 2`` and the
coefficient of ``a^(p-1 + p*(i + m*j))`` is ``C_ij``, so any ``p*m*n + p - 1``
results determine ``A @ B``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .field import ScalarMode, solve
from .padic import NeedMoreRows

COND_WARN = 1e10


class IllConditionedWarning(RuntimeWarning):
    pass


class IllConditioned(np.linalg.LinAlgError):
    def __init__(self, condition: float):
        super().__init__(f"Vandermonde system numerically singular (condition ~ {condition:.3g})")
        self.condition = condition


def ep_threshold(m: int, n: int, p: int) -> int:
    if min(m, n, p) < 1:
        raise ValueError("m, n, p must be >= 1")
    return p * m * n + p - 1


@dataclass(frozen=True)
class EpCode:
    m: int
    n: int
    p: int
    workers: int
    mode: ScalarMode

    def __post_init__(self):
        if not self.mode.is_real and self.mode.q <= self.workers:
            raise ValueError(f"F_{self.mode.q} has too few nonzero points for {self.workers} workers")

    @property
    def threshold(self) -> int:
        return ep_threshold(self.m, self.n, self.p)

    @property
    def points(self) -> np.ndarray:
        pts = np.arange(1, self.workers + 1)
        return pts.astype(np.float64) if self.mode.is_real else pts.astype(np.int64)

    def powers(self, k: int, exponents: np.ndarray) -> np.ndarray:
        a = self.points[k]
        if self.mode.is_real:
            return a ** exponents.astype(np.float64)
        return np.array([pow(int(a), int(e), self.mode.q) for e in exponents], dtype=np.int64)

    def a_exponents(self) -> np.ndarray:
        i, s = np.meshgrid(np.arange(self.m), np.arange(self.p), indexing="ij")
        return (s + self.p * i).reshape(-1)

    def b_exponents(self) -> np.ndarray:
        s, j = np.meshgrid(np.arange(self.p), np.arange(self.n), indexing="ij")
        return (self.p - 1 - s + self.p * self.m * j).reshape(-1)

    def output_exponent(self, i: int, j: int) -> int:
        return self.p - 1 + self.p * (i + self.m * j)


def ep_encode(code: EpCode, A_grid: np.ndarray, B_grid: np.ndarray, k: int):
    """Evaluate both encoding polynomials at worker ``k``'s point.

    ``A_grid`` is ``(m, p, P, S)`` and ``B_grid`` is ``(p, n, S, Q)``.
    """
    if A_grid.shape[:2] != (code.m, code.p) or B_grid.shape[:2] != (code.p, code.n):
        raise ValueError(f"grids {A_grid.shape[:2]}, {B_grid.shape[:2]} do not match EP ({code.m}, {code.n}, {code.p})")
    if not 0 <= k < code.workers:
        raise IndexError(f"worker {k} out of range")
    mode = code.mode
    a_tilde = mode.lincomb(code.powers(k, code.a_exponents()), A_grid.reshape((-1,) + A_grid.shape[2:]))
    b_tilde = mode.lincomb(code.powers(k, code.b_exponents()), B_grid.reshape((-1,) + B_grid.shape[2:]))
    return a_tilde, b_tilde


def vandermonde(code: EpCode, workers) -> np.ndarray:
    exps = np.arange(code.threshold)
    return np.stack([code.powers(k, exps) for k in workers])


def vandermonde_condition(code: EpCode, workers) -> float:
    V = np.asarray(vandermonde(code, workers), dtype=np.float64)
    with np.errstate(all="ignore"):
        return float(np.linalg.cond(V))


def ep_decode(code: EpCode, returned) -> np.ndarray:
    """Interpolate the product polynomial from the first ``threshold`` results.

    Raises :class:`NeedMoreRows` with too few distinct results.  In real mode a
    badly conditioned Vandermonde system triggers :class:`IllConditionedWarning`
    and a numerically singular one raises :class:`IllConditioned`.
    """
    seen, use = set(), []
    for k, res in returned:
        if k not in seen:
            seen.add(k)
            use.append((k, np.asarray(res)))
        if len(use) == code.threshold:
            break
    if len(use) < code.threshold:
        raise NeedMoreRows(len(use), code.threshold)
    workers = [k for k, _ in use]
    P, Q = use[0][1].shape
    V = vandermonde(code, workers)
    rhs = np.stack([r.reshape(-1) for _, r in use])
    mode = code.mode
    if mode.is_real:
        cond = vandermonde_condition(code, workers)
        if cond > COND_WARN:
            warnings.warn(f"EP Vandermonde condition number ~ {cond:.3g}", IllConditionedWarning, stacklevel=2)
    coeffs = solve(V, rhs, mode)
    if coeffs is None:
        if mode.is_real:
            raise IllConditioned(vandermonde_condition(code, workers))
        raise AssertionError("distinct evaluation points gave a singular Vandermonde matrix")  # pragma: no cover
    out = np.empty((code.m, code.n, P, Q), dtype=mode.dtype)
    for i in range(code.m):
        for j in range(code.n):
            out[i, j] = coeffs[code.output_exponent(i, j)].reshape(P, Q)
    return out.transpose(0, 2, 1, 3).reshape(code.m * P, code.n * Q)
