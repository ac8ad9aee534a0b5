"""Block partitions of the two factors and flattening of block products.

``A`` is cut into an ``x`` by ``z`` grid of ``P x S`` blocks and ``B`` into a
``z`` by ``y`` grid of ``S x Q`` blocks.  Grids are stored as 4-D arrays indexed
``[row_block, col_block, r, c]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BlockPartition:
    x: int
    y: int
    z: int
    P: int = 1
    S: int = 1
    Q: int = 1

    def __post_init__(self):
        for name in ("x", "y", "z", "P", "S", "Q"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def a_shape(self) -> tuple[int, int]:
        return (self.x * self.P, self.z * self.S)

    @property
    def b_shape(self) -> tuple[int, int]:
        return (self.z * self.S, self.y * self.Q)

    @property
    def c_shape(self) -> tuple[int, int]:
        return (self.x * self.P, self.y * self.Q)

    @classmethod
    def fit(cls, A: np.ndarray, B: np.ndarray, x: int, y: int, z: int) -> "BlockPartition":
        """Infer block sizes from the factor shapes; dimensions must divide exactly."""
        (ar, ac), (br, bc) = np.shape(A), np.shape(B)
        if ac != br:
            raise ValueError(f"inner dimensions differ: {np.shape(A)} @ {np.shape(B)}")
        if ar % x or bc % y or ac % z:
            raise ValueError(f"shapes {np.shape(A)}, {np.shape(B)} not divisible by ({x}, {y}, {z})")
        return cls(x, y, z, ar // x, ac // z, bc // y)


@dataclass
class BlockGrid:
    partition: BlockPartition
    role: str
    blocks: np.ndarray

    def __getitem__(self, idx):
        return self.blocks[idx]

    def assemble(self) -> np.ndarray:
        return assemble(self.blocks)


def split(M: np.ndarray, role: str, partition: BlockPartition) -> BlockGrid:
    """Cut ``M`` into the block grid for ``role`` ('A' or 'B')."""
    M = np.asarray(M)
    p = partition
    if role == "A":
        expected, grid = p.a_shape, (p.x, p.P, p.z, p.S)
    elif role == "B":
        expected, grid = p.b_shape, (p.z, p.S, p.y, p.Q)
    else:
        raise ValueError(f"role must be 'A' or 'B', got {role!r}")
    if M.shape != expected:
        raise ValueError(f"{role} has shape {M.shape}, partition expects {expected}")
    blocks = M.reshape(grid).transpose(0, 2, 1, 3).copy()
    return BlockGrid(partition, role, blocks)


def assemble(blocks: np.ndarray) -> np.ndarray:
    """Inverse of :func:`split`: glue a ``(rows, cols, h, w)`` grid back together."""
    blocks = np.asarray(blocks)
    nr, nc, h, w = blocks.shape
    return blocks.transpose(0, 2, 1, 3).reshape(nr * h, nc * w)


def row_blocks(M: np.ndarray, count: int) -> np.ndarray:
    """Split rows into ``count`` equal horizontal strips, shape ``(count, h, w)``."""
    M = np.asarray(M)
    if M.shape[0] % count:
        raise ValueError(f"{M.shape[0]} rows not divisible by {count}")
    return M.reshape(count, M.shape[0] // count, M.shape[1])


def col_blocks(M: np.ndarray, count: int) -> np.ndarray:
    """Split columns into ``count`` equal vertical strips, shape ``(count, h, w)``."""
    M = np.asarray(M)
    if M.shape[1] % count:
        raise ValueError(f"{M.shape[1]} columns not divisible by {count}")
    return M.reshape(M.shape[0], count, M.shape[1] // count).transpose(1, 0, 2).copy()


def flatten_products(C_blocks: np.ndarray) -> np.ndarray:
    """Vectorize an ``x`` by ``y`` family of ``P x Q`` blocks.

    Row ``i*y + j`` holds ``vec(C_ij)`` (row-major), i.e. (i, j) in lexicographic
    order, matching the column order of the output-side generator matrix.
    """
    C_blocks = np.asarray(C_blocks)
    if C_blocks.ndim != 4:
        raise ValueError("expected an (x, y, P, Q) block family")
    x, y, P, Q = C_blocks.shape
    return C_blocks.reshape(x * y, P * Q)


def unflatten_products(flat: np.ndarray, x: int, y: int, P: int, Q: int) -> np.ndarray:
    flat = np.asarray(flat)
    if flat.shape != (x * y, P * Q):
        raise ValueError(f"expected shape {(x * y, P * Q)}, got {flat.shape}")
    return flat.reshape(x, y, P, Q)


def block_product(A_grid: np.ndarray, B_grid: np.ndarray, mode) -> np.ndarray:
    """``C_ij = sum_k A_ik B_kj`` on block grids (reference path, no coding)."""
    x, z = A_grid.shape[:2]
    y = B_grid.shape[1]
    out = np.zeros((x, y, A_grid.shape[2], B_grid.shape[3]), dtype=mode.dtype)
    for i in range(x):
        for j in range(y):
            acc = mode.matmul(A_grid[i, 0], B_grid[0, j])
            for k in range(1, z):
                acc = mode.add(acc, mode.matmul(A_grid[i, k], B_grid[k, j]))
            out[i, j] = acc
    return out
