"""Bilinear decompositions of block matrix multiplication.

A decomposition of the ``(a, b, c)`` product (``A`` is an ``a x c`` grid of
super-blocks, ``B`` is ``c x b``) is a list of terms.  Term ``t`` forms
``E_A(A)`` and ``E_B(B)`` as signed sums of super-blocks, one worker-sized
product ``E_A(A) @ E_B(B)``, and scatters it into output blocks with signed
weights ``D``.  Decompositions are plain data and round-trip through JSON.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .field import ScalarMode

Index = tuple[int, int]


@dataclass(frozen=True)
class LinearCombMap:
    """Signed integer combination of grid blocks, e.g. ``A^1 + A^4``."""

    weights: dict[Index, int]

    def apply(self, grid: np.ndarray, mode: ScalarMode) -> np.ndarray:
        out = None
        for idx, w in sorted(self.weights.items()):
            term = mode.scale(w, grid[idx])
            out = term if out is None else mode.add(out, term)
        if out is None:
            return np.zeros(grid.shape[2:], dtype=mode.dtype)
        return out

    def dense(self, rows: int, cols: int) -> np.ndarray:
        v = np.zeros(rows * cols, dtype=np.int64)
        for (i, j), w in self.weights.items():
            v[i * cols + j] += w
        return v


@dataclass(frozen=True)
class Term:
    ea: LinearCombMap
    eb: LinearCombMap
    d: LinearCombMap


@dataclass
class TensorDecomposition:
    a: int
    b: int
    c: int
    terms: list[Term]
    name: str = ""

    @property
    def r(self) -> int:
        return len(self.terms)

    def images(self, A_grid: np.ndarray, B_grid: np.ndarray, mode: ScalarMode, t: int):
        term = self.terms[t]
        return term.ea.apply(A_grid, mode), term.eb.apply(B_grid, mode)

    def recombine(self, products, mode: ScalarMode) -> np.ndarray:
        """Scatter term products into the ``(a, b, h, w)`` output grid."""
        h, w = np.shape(products[0])
        out = np.zeros((self.a, self.b, h, w), dtype=mode.dtype)
        for term, prod in zip(self.terms, products):
            for idx, wt in term.d.weights.items():
                out[idx] = mode.add(out[idx], mode.scale(wt, prod))
        return out

    def evaluate(self, A_grid: np.ndarray, B_grid: np.ndarray, mode: ScalarMode) -> np.ndarray:
        self._check_grids(A_grid, B_grid)
        products = [mode.matmul(*self.images(A_grid, B_grid, mode, t)) for t in range(self.r)]
        return self.recombine(products, mode)

    def _check_grids(self, A_grid, B_grid):
        if A_grid.shape[:2] != (self.a, self.c) or B_grid.shape[:2] != (self.c, self.b):
            raise ValueError(
                f"grids {A_grid.shape[:2]} x {B_grid.shape[:2]} do not match "
                f"decomposition shape ({self.a}, {self.b}, {self.c})"
            )

    def coefficient_tensor(self) -> np.ndarray:
        """Sum of the rank-one terms as an integer ``(ac, cb, ab)`` tensor."""
        T = np.zeros((self.a * self.c, self.c * self.b, self.a * self.b), dtype=np.int64)
        for term in self.terms:
            ea = term.ea.dense(self.a, self.c)
            eb = term.eb.dense(self.c, self.b)
            d = term.d.dense(self.a, self.b)
            T += np.einsum("i,j,k->ijk", ea, eb, d)
        return T

    def to_dict(self) -> dict:
        def enc(m: LinearCombMap) -> dict:
            return {f"{i + 1},{j + 1}": int(w) for (i, j), w in sorted(m.weights.items())}

        return {
            "name": self.name,
            "rank": self.r,
            "shapes": {"A": [self.a, self.c], "B": [self.c, self.b], "C": [self.a, self.b]},
            "terms": [{"E": [enc(t.ea), enc(t.eb)], "D": enc(t.d)} for t in self.terms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TensorDecomposition":
        def dec(m: dict) -> LinearCombMap:
            out = {}
            for key, w in m.items():
                i, j = (int(s) - 1 for s in key.split(","))
                out[(i, j)] = int(w)
            return LinearCombMap(out)

        (a, c), (c2, b), (a2, b2) = data["shapes"]["A"], data["shapes"]["B"], data["shapes"]["C"]
        if c != c2 or a != a2 or b != b2:
            raise ValueError(f"inconsistent shapes {data['shapes']}")
        terms = []
        for t in data["terms"]:
            if len(t["E"]) != 2:
                raise ValueError("only bilinear (two-argument) terms are supported")
            terms.append(Term(dec(t["E"][0]), dec(t["E"][1]), dec(t["D"])))
        if "rank" in data and data["rank"] != len(terms):
            raise ValueError(f"rank {data['rank']} but {len(terms)} terms listed")
        return cls(a, b, c, terms, data.get("name", ""))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "TensorDecomposition":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _m(**kw) -> LinearCombMap:
    # block names follow the 2x2 super-block numbering 1=(1,1) 2=(1,2) 3=(2,1) 4=(2,2)
    pos = {"1": (0, 0), "2": (0, 1), "3": (1, 0), "4": (1, 1)}
    return LinearCombMap({pos[k[1:]]: v for k, v in kw.items()})


def strassen() -> TensorDecomposition:
    """One level of Strassen's algorithm: seven products for a 2x2x2 block product."""
    T = [
        (_m(A1=1, A4=1), _m(B1=1, B4=1), _m(C1=1, C4=1)),
        (_m(A3=1, A4=1), _m(B1=1), _m(C3=1, C4=-1)),
        (_m(A1=1), _m(B2=1, B4=-1), _m(C2=1, C4=1)),
        (_m(A4=1), _m(B3=1, B1=-1), _m(C1=1, C3=1)),
        (_m(A1=1, A2=1), _m(B4=1), _m(C1=-1, C2=1)),
        (_m(A3=1, A1=-1), _m(B1=1, B2=1), _m(C4=1)),
        (_m(A2=1, A4=-1), _m(B3=1, B4=1), _m(C1=1)),
    ]
    return TensorDecomposition(2, 2, 2, [Term(*t) for t in T], "strassen")


def trivial(x: int, y: int, z: int) -> TensorDecomposition:
    """The ``x*y*z`` single-block-product terms ``A_ik B_kj -> C_ij``."""
    if min(x, y, z) < 1:
        raise ValueError("x, y, z must be >= 1")
    terms = [
        Term(LinearCombMap({(i, k): 1}), LinearCombMap({(k, j): 1}), LinearCombMap({(i, j): 1}))
        for i in range(x)
        for j in range(y)
        for k in range(z)
    ]
    return TensorDecomposition(x, y, z, terms, f"trivial{x}{y}{z}")


def matmul_tensor(a: int, b: int, c: int) -> np.ndarray:
    """Structure tensor of ``(a x c) @ (c x b)``: entry 1 at ``(ik, kj, ij)``."""
    T = np.zeros((a * c, c * b, a * b), dtype=np.int64)
    for i in range(a):
        for j in range(b):
            for k in range(c):
                T[i * c + k, k * b + j, i * b + j] = 1
    return T


@dataclass
class VerifyResult:
    passed: bool
    trials: int
    failures: int
    max_deviation: float
    suspect_terms: list[int] = field(default_factory=list)

    def __str__(self):
        verdict = "pass" if self.passed else "FAIL"
        s = f"{verdict}: {self.trials - self.failures}/{self.trials} trials, max deviation {self.max_deviation:.3g}"
        if self.suspect_terms:
            s += ", suspect terms " + ", ".join(f"T{t + 1}" for t in self.suspect_terms)
        return s


def suspect_terms(decomp: TensorDecomposition) -> list[int]:
    """Terms whose support covers every nonzero entry of the coefficient residual.

    A single corrupted sign or weight leaves a residual supported inside the
    faulty term, so this usually names it.  Falls back to every term touching
    the residual.
    """
    resid = matmul_tensor(decomp.a, decomp.b, decomp.c) - decomp.coefficient_tensor()
    bad = np.argwhere(resid != 0)
    if len(bad) == 0:
        return []
    covering, touching = [], []
    for t, term in enumerate(decomp.terms):
        ea = term.ea.dense(decomp.a, decomp.c) != 0
        eb = term.eb.dense(decomp.c, decomp.b) != 0
        d = term.d.dense(decomp.a, decomp.b) != 0
        hits = ea[bad[:, 0]] & eb[bad[:, 1]] & d[bad[:, 2]]
        if hits.all():
            covering.append(t)
        if hits.any():
            touching.append(t)
    return covering or touching


def verify(
    decomp: TensorDecomposition,
    trials: int = 100,
    mode: ScalarMode | None = None,
    rng: np.random.Generator | None = None,
    block_size: int = 4,
) -> VerifyResult:
    """Check ``sum_t D_t(E_A(A) E_B(B)) == A @ B`` on random inputs.

    Exact equality is required over F_q; in real mode the relative Frobenius
    error must stay within ``1e-10``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    mode = mode or ScalarMode.finite(101)
    rng = rng or np.random.default_rng()
    h = block_size
    failures, worst = 0, 0.0
    for _ in range(trials):
        A = mode.random((decomp.a, decomp.c, h, h), rng)
        B = mode.random((decomp.c, decomp.b, h, h), rng)
        got = decomp.evaluate(A, B, mode)
        want = np.einsum("ikpr,kjrs->ijps", A, B)
        if mode.is_real:
            dev = float(np.linalg.norm(got - want) / np.linalg.norm(want))
            bad = dev > 1e-10
        else:
            diff = mode.sub(got, np.mod(want, mode.q))
            dev = float(np.count_nonzero(diff))
            bad = dev > 0
        worst = max(worst, dev)
        failures += bad
    suspects = suspect_terms(decomp) if failures else []
    return VerifyResult(failures == 0, trials, failures, worst, suspects)
