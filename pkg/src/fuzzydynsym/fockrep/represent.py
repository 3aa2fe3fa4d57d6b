"""Superoperator matrices of ladder polynomials and the weighted geometry."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..ncalg.algebra import GENERATORS, OperatorPoly
from .basis import OpSpaceBasis, enumerate_basis, fnv1a_64

__all__ = [
    "GramWeights",
    "bracket",
    "PhysicalBasis",
    "SuperMatrix",
    "gram_weights",
    "hermitian_check",
    "inner_product",
    "norm_squared",
    "physical_basis",
    "represent",
    "restrict",
]


@dataclass(frozen=True, eq=False)
class SuperMatrix:
    """Matrix of a superoperator on vectorized operator wave functions.

    ``matrix`` is a scipy sparse matrix or a dense array; ``space`` is
    ``"full"`` (all cells) or ``"physical"`` (diagonal sector blocks).
    ``overflow`` marks source cells whose image was cut by the truncation.
    """

    matrix: sp.spmatrix | np.ndarray
    lam: float
    n_max: int
    space: str
    basis_hash: int
    overflow: np.ndarray | None = None
    masks: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def toarray(self) -> np.ndarray:
        m = self.matrix
        return m.toarray() if sp.issparse(m) else np.asarray(m)

    def __matmul__(self, other):
        if isinstance(other, SuperMatrix):
            _check_compatible(self, other)
            return self.with_matrix(self.matrix @ other.matrix, _merge_overflow(self, other))
        return self.matrix @ other

    def __add__(self, other: "SuperMatrix") -> "SuperMatrix":
        _check_compatible(self, other)
        return self.with_matrix(self.matrix + other.matrix, _merge_overflow(self, other))

    def __sub__(self, other: "SuperMatrix") -> "SuperMatrix":
        _check_compatible(self, other)
        return self.with_matrix(self.matrix - other.matrix, _merge_overflow(self, other))

    def __mul__(self, scalar) -> "SuperMatrix":
        return self.with_matrix(self.matrix * scalar, self.overflow)

    __rmul__ = __mul__

    def __neg__(self) -> "SuperMatrix":
        return self * -1

    def with_matrix(self, matrix, overflow=None) -> "SuperMatrix":
        return SuperMatrix(matrix, self.lam, self.n_max, self.space, self.basis_hash, overflow, dict(self.masks))


def _check_compatible(x: SuperMatrix, y: SuperMatrix) -> None:
    if (x.space, x.n_max, x.basis_hash) != (y.space, y.n_max, y.basis_hash) or x.lam != y.lam:
        raise ValueError("superoperators live on different bases or lambda values")


def _merge_overflow(x: SuperMatrix, y: SuperMatrix):
    if x.overflow is None:
        return y.overflow
    if y.overflow is None:
        return x.overflow
    return x.overflow | y.overflow


def bracket(x: SuperMatrix, y: SuperMatrix) -> SuperMatrix:
    """Matrix commutator ``[x, y]``."""
    return x @ y - y @ x


class PhysicalBasis:
    """Cells of the block-diagonal (number-preserving) operator wave functions.

    Sector ``n`` holds an ``(n+1) x (n+1)`` block, vectorized row-major;
    sectors are stacked in ascending order.  This is the order the physical
    cells have inside :class:`OpSpaceBasis`, but building it does not need the
    full ``D^2`` cell list.
    """

    def __init__(self, n_max: int):
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        self.n_max = int(n_max)
        sizes = np.arange(1, self.n_max + 2) ** 2
        self.offsets = np.concatenate([[0], np.cumsum(sizes)])
        self.dimension = int(self.offsets[-1])
        self.sector = np.repeat(np.arange(self.n_max + 1), sizes)
        rows, cols = [], []
        for n in range(self.n_max + 1):
            ii, jj = np.divmod(np.arange((n + 1) ** 2), n + 1)
            rows.append(ii)
            cols.append(jj)
        # local state indices inside the sector (index = n2)
        self.row_state = np.concatenate(rows)
        self.col_state = np.concatenate(cols)
        self.diagonal = self.row_state == self.col_state

    def block(self, n: int) -> slice:
        return slice(int(self.offsets[n]), int(self.offsets[n + 1]))

    def interior(self, margin: int) -> np.ndarray:
        return self.sector <= self.n_max - margin

    def description(self) -> bytes:
        return f"fuzzydynsym-physical:v1:nmax={self.n_max}".encode()

    @cached_property
    def hash(self) -> int:
        return fnv1a_64(self.description())

    def full_indices(self, full: OpSpaceBasis) -> np.ndarray:
        """Positions of the physical cells inside a full basis with the same ``n_max``."""
        if full.n_max != self.n_max:
            raise ValueError("n_max mismatch")
        idx = np.flatnonzero(full.physical)
        return idx

    def blocks_to_vector(self, blocks) -> np.ndarray:
        return np.concatenate([np.asarray(b).reshape(-1) for b in blocks])

    def vector_to_blocks(self, v: np.ndarray) -> list[np.ndarray]:
        return [np.asarray(v)[self.block(n)].reshape(n + 1, n + 1) for n in range(self.n_max + 1)]


@lru_cache(maxsize=8)
def physical_basis(n_max: int) -> PhysicalBasis:
    return PhysicalBasis(n_max)


@dataclass(frozen=True)
class GramWeights:
    """Weights ``4 pi lam^3 (n + 1)`` of the Hilbert-Schmidt norm, ``n`` the source sector."""

    lam: float
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def gram_weights(basis: OpSpaceBasis | PhysicalBasis, lam: float) -> GramWeights:
    if lam <= 0:
        raise ValueError("lambda must be positive")
    source = basis.source_sector if isinstance(basis, OpSpaceBasis) else basis.sector
    w = 4.0 * np.pi * lam**3 * (source + 1.0)
    w.setflags(write=False)
    return GramWeights(lam, w)


def inner_product(psi1: np.ndarray, psi2: np.ndarray, w: GramWeights) -> complex:
    psi1, psi2 = np.asarray(psi1), np.asarray(psi2)
    if psi1.shape != psi2.shape or psi1.shape[-1] != len(w):
        raise ValueError(f"dimension mismatch: {psi1.shape}, {psi2.shape} vs {len(w)} weights")
    return complex(np.sum(w.values * np.conj(psi1) * psi2))


def norm_squared(psi: np.ndarray, w: GramWeights) -> float:
    return inner_product(psi, psi, w).real


def restrict(m, mask: np.ndarray):
    idx = np.flatnonzero(mask)
    if sp.issparse(m):
        m = m.tocsr()
        return m[idx][:, idx]
    return np.asarray(m)[np.ix_(idx, idx)]


def hermitian_check(M: SuperMatrix | np.ndarray, w: GramWeights, mask: np.ndarray | None = None) -> float:
    """``|M - M*|_F / |M|_F`` on the masked block, ``M*`` the weighted adjoint."""
    m = M.matrix if isinstance(M, SuperMatrix) else M
    weights = w.values
    if mask is not None:
        m = restrict(m, mask)
        weights = weights[np.flatnonzero(mask)]
    if sp.issparse(m):
        m = sp.csr_matrix(m)
        adj = sp.diags(1.0 / weights) @ m.conj().T @ sp.diags(weights)
        num = spla.norm(m - adj)
        den = spla.norm(m)
    else:
        m = np.asarray(m)
        adj = (m.conj().T * weights[None, :]) / weights[:, None]
        num = np.linalg.norm(m - adj)
        den = np.linalg.norm(m)
    return float(num / den) if den > 0 else float(num)


@lru_cache(maxsize=8)
def _generator_matrices(n_max: int) -> tuple[sp.csr_matrix, ...]:
    basis = enumerate_basis(n_max)
    D = basis.fock_dimension
    eye = sp.identity(D, format="csr")
    order = basis.order
    mats = []
    for g in GENERATORS:
        lad = basis.fock.ladders[g.mode - 1]
        one_sided = lad.T if g.daggered else lad
        if g.family == "left":
            raw = sp.kron(one_sided, eye, format="csr")  # Psi -> A Psi
        else:
            raw = sp.kron(eye, one_sided.T, format="csr")  # Psi -> Psi A
        mats.append(raw[order][:, order].tocsr())
    return tuple(mats)


def _overflow(p: OperatorPoly, basis: OpSpaceBasis) -> np.ndarray:
    """Source cells for which some term would leave the truncated space."""
    flag = np.zeros(basis.dimension, dtype=bool)
    m, n = basis.target_sector, basis.source_sector
    for (_lam, word), _c in p.items():
        n_ad, n_a = word[0] + word[1], word[4] + word[5]
        # b-hat multiplies by a on the right, raising the source sector
        n_b = word[6] + word[7]
        flag |= (m >= n_a) & (m - n_a + n_ad > basis.n_max)
        flag |= (n + n_b) > basis.n_max
    return flag


def represent(p: OperatorPoly, basis: OpSpaceBasis | int, lam: float) -> SuperMatrix:
    """Matrix of the superoperator ``p`` on all cells of a truncated basis.

    a-hat generators multiply from the left, b-hat generators from the right;
    ``lam`` is substituted numerically here and nowhere else.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if isinstance(basis, int):
        basis = enumerate_basis(basis)
    p = OperatorPoly.coerce(p)
    gens = _generator_matrices(basis.n_max)
    dim = basis.dimension
    total = sp.csr_matrix((dim, dim), dtype=complex)
    for (lam_pow, word), c in p.items():
        term = sp.identity(dim, dtype=complex, format="csr")
        for g, e in zip(GENERATORS, word):
            for _ in range(e):
                term = term @ gens[g.index]
        total = total + (c.to_complex() * lam**lam_pow) * term
    total.sum_duplicates()
    total.eliminate_zeros()
    return SuperMatrix(total, float(lam), basis.n_max, "full", basis.hash, _overflow(p, basis))
