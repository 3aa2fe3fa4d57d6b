"""Truncated auxiliary Fock space and the operator wave-function basis."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse as sp

__all__ = [
    "FockSpace",
    "OpSpaceBasis",
    "SectorBasis",
    "enumerate_basis",
    "fnv1a_64",
    "sector_basis",
    "sector_ladder",
]


def fnv1a_64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


@dataclass(frozen=True)
class SectorBasis:
    """States ``|n1, n2>`` with ``n1 + n2 = n``, ordered by decreasing ``n1``."""

    n: int

    @property
    def states(self) -> tuple[tuple[int, int], ...]:
        return tuple((self.n - k, k) for k in range(self.n + 1))

    @property
    def dimension(self) -> int:
        return self.n + 1


def sector_basis(n: int) -> SectorBasis:
    if n < 0:
        raise ValueError("sector index must be non-negative")
    return SectorBasis(n)


@lru_cache(maxsize=None)
def sector_ladder(n: int, alpha: int) -> np.ndarray:
    """Matrix of ``a_alpha`` from sector ``n`` to sector ``n - 1`` (shape ``n x (n+1)``)."""
    if n < 1:
        raise ValueError("a_alpha maps F_n to F_{n-1}; need n >= 1")
    out = np.zeros((n, n + 1))
    for col in range(n + 1):
        n1, n2 = n - col, col
        if alpha == 1 and n1 > 0:
            out[col, col] = np.sqrt(n1)  # (n1 - 1, n2) sits at index n2 in F_{n-1}
        elif alpha == 2 and n2 > 0:
            out[col - 1, col] = np.sqrt(n2)  # (n1, n2 - 1) sits at index n2 - 1
    out.setflags(write=False)
    return out


class FockSpace:
    """Auxiliary two-mode Fock space truncated at total occupation ``n_max``.

    Global state order: sectors ascending, decreasing ``n1`` inside a sector.
    """

    def __init__(self, n_max: int):
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        self.n_max = int(n_max)
        self.offsets = np.array([n * (n + 1) // 2 for n in range(self.n_max + 2)])
        self.dimension = int(self.offsets[-1])
        self.sector_of = np.repeat(np.arange(self.n_max + 1), np.arange(1, self.n_max + 2))

    def index(self, n1: int, n2: int) -> int:
        n = n1 + n2
        if n > self.n_max:
            raise IndexError("state beyond truncation")
        return int(self.offsets[n]) + n2

    @cached_property
    def ladders(self) -> tuple[sp.csr_matrix, sp.csr_matrix]:
        """``a_1, a_2`` on the truncated space (creation is the transpose)."""
        out = []
        for alpha in (1, 2):
            rows, cols, vals = [], [], []
            for n in range(1, self.n_max + 1):
                blk = sector_ladder(n, alpha)
                r, c = np.nonzero(blk)
                rows.append(r + self.offsets[n - 1])
                cols.append(c + self.offsets[n])
                vals.append(blk[r, c])
            if rows:
                m = sp.csr_matrix(
                    (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                    shape=(self.dimension, self.dimension),
                )
            else:
                m = sp.csr_matrix((self.dimension, self.dimension))
            out.append(m)
        return tuple(out)


class OpSpaceBasis:
    """Matrix units ``|i><j|`` of the truncated operator space.

    Cells are ordered by (target sector ``m``, source sector ``n``) ascending,
    row-major inside each ``(m, n)`` block.  The physical cells are the
    diagonal blocks ``m == n``.
    """

    def __init__(self, n_max: int):
        self.fock = FockSpace(n_max)
        self.n_max = self.fock.n_max
        D = self.fock.dimension
        sec = self.fock.sector_of
        off = self.fock.offsets
        blocks = []
        for m in range(self.n_max + 1):
            for n in range(self.n_max + 1):
                i = np.arange(off[m], off[m + 1])
                j = np.arange(off[n], off[n + 1])
                ii, jj = np.meshgrid(i, j, indexing="ij")
                blocks.append(np.stack([ii.ravel(), jj.ravel()], axis=1))
        cells = np.concatenate(blocks) if blocks else np.zeros((0, 2), dtype=int)
        self.rows = cells[:, 0].astype(np.int64)  # global Fock index of the target state
        self.cols = cells[:, 1].astype(np.int64)  # global Fock index of the source state
        self.target_sector = sec[self.rows]
        self.source_sector = sec[self.cols]
        # position of the row-major vec index r * D + c inside the cell order
        self.order = self.rows * D + self.cols
        self.position = np.empty(D * D, dtype=np.int64)
        self.position[self.order] = np.arange(D * D)
        self.physical = self.target_sector == self.source_sector
        for arr in (self.rows, self.cols, self.target_sector, self.source_sector, self.physical):
            arr.setflags(write=False)

    @property
    def dimension(self) -> int:
        return len(self.rows)

    @property
    def fock_dimension(self) -> int:
        return self.fock.dimension

    def interior(self, margin: int) -> np.ndarray:
        top = self.n_max - margin
        return (self.target_sector <= top) & (self.source_sector <= top)

    def physical_interior(self, margin: int) -> np.ndarray:
        return self.physical & self.interior(margin)

    def description(self) -> bytes:
        return (
            f"fuzzydynsym-opspace:v1:nmax={self.n_max}:".encode()
            + self.rows.astype("<u4").tobytes()
            + self.cols.astype("<u4").tobytes()
        )

    @cached_property
    def hash(self) -> int:
        """64-bit FNV-1a of the ordered cell list."""
        return fnv1a_64(self.description())

    def vec(self, psi: np.ndarray) -> np.ndarray:
        """Vectorize a ``D x D`` matrix into the cell order."""
        psi = np.asarray(psi)
        return psi.reshape(-1)[self.order]

    def unvec(self, v: np.ndarray) -> np.ndarray:
        D = self.fock_dimension
        return np.asarray(v)[self.position].reshape(D, D)


@lru_cache(maxsize=8)
def enumerate_basis(n_max: int) -> OpSpaceBasis:
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    return OpSpaceBasis(n_max)
