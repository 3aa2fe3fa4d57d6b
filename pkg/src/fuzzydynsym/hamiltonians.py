"""NC Laplacian, Coulomb Hamiltonian and companions on the physical subspace.

Operator wave functions that commute with ``N`` are block diagonal,
``Psi = (+)_n Psi_n`` with ``Psi_n`` acting on the sector ``F_n``.  All
operators here are assembled sector block by sector block from the small
ladder matrices ``a_alpha : F_n -> F_{n-1}`` as sparse matrices on the
row-major vectorization of the blocks (see :class:`PhysicalBasis`).

The truncation keeps sectors ``n <= n_max``.  The double commutator is the
compression of the untruncated one, i.e. ``Psi_{n_max+1} = 0``: a hard wall
at ``r = lam (n_max + 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .config import TOL, UNITS
from .fockrep import GramWeights, PhysicalBasis, SuperMatrix, gram_weights, physical_basis, sector_ladder
from .ncalg.builders import PAULI

__all__ = [
    "EigenSolution",
    "ModelParams",
    "NonConvergenceError",
    "NonHermitianError",
    "angular_momentum_superop",
    "cluster_values",
    "coulomb_hamiltonian",
    "double_commutator",
    "eigensolve",
    "inverse_r",
    "laplacian",
    "m0_hamiltonian",
    "m0_casimir",
    "m0_indices",
    "m0_sectors",
    "nc_laplace_residual",
    "physical_identity",
    "position_superop",
    "radius_superop",
    "sector_bilinear",
    "velocity",
]


class NonHermitianError(ValueError):
    """Input to the eigensolver is not self-adjoint on the requested subspace."""


class NonConvergenceError(RuntimeError):
    """An eigenpair failed the residual bound."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class ModelParams:
    """Length ``lam``, Coulomb strength ``q`` (attractive for ``q > 0``), truncation ``n_max``."""

    lam: float
    q: float = 1.0
    n_max: int = 20

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise ValueError("n_max must be an integer >= 2")

    @property
    def basis(self) -> PhysicalBasis:
        return physical_basis(self.n_max)

    @property
    def weights(self) -> GramWeights:
        return gram_weights(self.basis, self.lam)

    @property
    def r_wall(self) -> float:
        return self.lam * (self.n_max + 2)


def _wrap(params: ModelParams, matrix, **masks) -> SuperMatrix:
    return SuperMatrix(matrix, float(params.lam), params.n_max, "physical", params.basis.hash, None, masks)


@lru_cache(maxsize=None)
def sector_bilinear(n: int, j: int) -> np.ndarray:
    """``a^+ sigma_j a`` restricted to ``F_n`` (equals twice the spin-n/2 generator)."""
    if n == 0:
        return np.zeros((1, 1), dtype=complex)
    s = PAULI[j - 1]
    out = np.zeros((n + 1, n + 1), dtype=complex)
    for al in (1, 2):
        for be in (1, 2):
            c = s[al - 1][be - 1]
            if c:
                out += c.to_complex() * (sector_ladder(n, al).T @ sector_ladder(n, be))
    out.setflags(write=False)
    return out


def _block_diag(blocks) -> sp.csr_matrix:
    return sp.block_diag(blocks, format="csr")


@lru_cache(maxsize=16)
def _angular(n_max: int, j: int) -> sp.csr_matrix:
    blocks = []
    for n in range(n_max + 1):
        J = sp.csr_matrix(sector_bilinear(n, j))
        eye = sp.identity(n + 1, format="csr")
        blocks.append(0.5 * (sp.kron(J, eye) - sp.kron(eye, J.T)))
    return _block_diag(blocks)


@lru_cache(maxsize=16)
def _position_unit(n_max: int, j: int) -> sp.csr_matrix:
    """Symmetrized position at unit length scale."""
    blocks = []
    for n in range(n_max + 1):
        J = sp.csr_matrix(sector_bilinear(n, j))
        eye = sp.identity(n + 1, format="csr")
        blocks.append(0.5 * (sp.kron(J, eye) + sp.kron(eye, J.T)))
    return _block_diag(blocks)


@lru_cache(maxsize=8)
def double_commutator(n_max: int) -> sp.csr_matrix:
    """``Psi -> sum_alpha [a_alpha^+, [a_alpha, Psi]]`` compressed to sectors ``<= n_max``.

    Real symmetric in the plain (unweighted) Hilbert-Schmidt product and
    block tridiagonal across sectors.
    """
    grid: list[list] = [[None] * (n_max + 1) for _ in range(n_max + 1)]
    for n in range(n_max + 1):
        grid[n][n] = (2.0 * n + 2.0) * sp.identity((n + 1) ** 2, format="csr")
        if n >= 1:
            grid[n][n - 1] = -sum(
                sp.kron(sp.csr_matrix(sector_ladder(n, al).T), sp.csr_matrix(sector_ladder(n, al).T)) for al in (1, 2)
            )
        if n < n_max:
            grid[n][n + 1] = -sum(
                sp.kron(sp.csr_matrix(sector_ladder(n + 1, al)), sp.csr_matrix(sector_ladder(n + 1, al))) for al in (1, 2)
            )
    return sp.bmat(grid, format="csr")


def _radius_values(params: ModelParams) -> np.ndarray:
    return params.lam * (params.basis.sector + 1.0)


def physical_identity(params: ModelParams) -> SuperMatrix:
    return _wrap(params, sp.identity(params.basis.dimension, format="csr"))


def radius_superop(params: ModelParams) -> SuperMatrix:
    """Multiplication by ``r = lam (N + 1)``; left and right agree on physical cells."""
    return _wrap(params, sp.diags(_radius_values(params), format="csr"))


def inverse_r(params: ModelParams) -> SuperMatrix:
    """Exact diagonal inverse of ``r``: ``1 / (lam (n + 1))`` on sector ``n``."""
    return _wrap(params, sp.diags(1.0 / _radius_values(params), format="csr"))


def laplacian(params: ModelParams) -> SuperMatrix:
    """``Delta Psi = -(1 / (lam r)) [a^+_alpha, [a_alpha, Psi]]``."""
    D = double_commutator(params.n_max)
    return _wrap(params, (sp.diags(-1.0 / (params.lam * _radius_values(params))) @ D).tocsr())


def coulomb_hamiltonian(params: ModelParams, units=UNITS) -> SuperMatrix:
    """``H = -(hbar^2 / 2m) Delta - q / r`` (real, weighted self-adjoint)."""
    kinetic = laplacian(params).matrix * (-(units.hbar**2) / (2.0 * units.mass))
    H = kinetic - params.q * inverse_r(params).matrix
    return _wrap(params, H.tocsr())


def angular_momentum_superop(j: int, params: ModelParams) -> SuperMatrix:
    """``L_j Psi = 1/2 [a^+ sigma_j a, Psi]``."""
    if j not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {j!r}")
    return _wrap(params, _angular(params.n_max, j))


def position_superop(k: int, params: ModelParams) -> SuperMatrix:
    """``x-hat_k Psi = 1/2 (x_k Psi + Psi x_k)``."""
    if k not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {k!r}")
    return _wrap(params, params.lam * _position_unit(params.n_max, k))


def velocity(i: int, H: SuperMatrix, params: ModelParams) -> SuperMatrix:
    """``V_i = -i [x-hat_i, H]``."""
    x = position_superop(i, params).matrix
    h = H.matrix
    return _wrap(params, (-1j * (x @ h - h @ x)).tocsr())


def nc_laplace_residual(values: Sequence[float] | Callable[[float], float], params: ModelParams) -> np.ndarray:
    """Per-sector norm of ``Delta V`` for the radial function ``V(r)``.

    ``values`` is either the sequence ``v_n = V(lam (n+1))`` for
    ``n = 0..n_max`` or a callable ``V``.  The residual is the plain
    Frobenius norm of each sector block of ``Delta (V P_phys)``.
    """
    if callable(values):
        v = np.array([values(params.lam * (n + 1)) for n in range(params.n_max + 1)], dtype=float)
    else:
        v = np.asarray(values, dtype=float)
    if v.shape != (params.n_max + 1,):
        raise ValueError(f"expected {params.n_max + 1} sector values")
    basis = params.basis
    psi = np.where(basis.diagonal, v[basis.sector], 0.0)
    out = laplacian(params).matrix @ psi
    return np.array([np.linalg.norm(out[basis.block(n)]) for n in range(params.n_max + 1)])


# ---------------------------------------------------------------------------
# m = 0 reduction
#
# L_3 = ad(S_3) is diagonal on matrix units and vanishes exactly on diagonal
# blocks, so H maps diagonal Psi to diagonal Psi.  Every (level, l) pair
# appears there exactly once, which shrinks the eigenproblem from
# sum (n+1)^2 to sum (n+1) unknowns.


def m0_indices(params: ModelParams) -> np.ndarray:
    """Positions of the diagonal cells inside the physical basis."""
    return np.flatnonzero(params.basis.diagonal)


@lru_cache(maxsize=8)
def _m0_double_commutator(n_max: int) -> sp.csr_matrix:
    offsets = np.concatenate([[0], np.cumsum(np.arange(1, n_max + 2))])
    rows, cols, vals = [], [], []
    for n in range(n_max + 1):
        for k in range(n + 1):  # k = n2, n1 = n - k
            n1, n2 = n - k, k
            me = offsets[n] + k
            rows.append(me), cols.append(me), vals.append(2.0 * n + 2.0)
            if n >= 1:
                if n1 >= 1:
                    rows.append(me), cols.append(offsets[n - 1] + k), vals.append(-float(n1))
                if n2 >= 1:
                    rows.append(me), cols.append(offsets[n - 1] + k - 1), vals.append(-float(n2))
            if n < n_max:
                rows.append(me), cols.append(offsets[n + 1] + k), vals.append(-float(n1 + 1))
                rows.append(me), cols.append(offsets[n + 1] + k + 1), vals.append(-float(n2 + 1))
    dim = offsets[-1]
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))


def m0_sectors(n_max: int) -> np.ndarray:
    return np.repeat(np.arange(n_max + 1), np.arange(1, n_max + 2))


def m0_hamiltonian(params: ModelParams, units=UNITS) -> tuple[sp.csr_matrix, np.ndarray]:
    """Coulomb Hamiltonian on diagonal operator wave functions, with its weights."""
    sec = m0_sectors(params.n_max)
    r = params.lam * (sec + 1.0)
    D = _m0_double_commutator(params.n_max)
    H = sp.diags((units.hbar**2 / (2.0 * units.mass)) / (params.lam * r)) @ D - sp.diags(params.q / r)
    w = 4.0 * np.pi * params.lam**3 * (sec + 1.0)
    return H.tocsr(), w


@lru_cache(maxsize=8)
def m0_casimir(n_max: int) -> sp.csr_matrix:
    """``L^2`` restricted to diagonal operator wave functions."""
    blocks = []
    for n in range(n_max + 1):
        L2 = 0
        eye = sp.identity(n + 1, format="csr")
        for j in (1, 2, 3):
            J = sp.csr_matrix(sector_bilinear(n, j))
            Lj = 0.5 * (sp.kron(J, eye) - sp.kron(eye, J.T))
            L2 = L2 + Lj @ Lj
        diag = np.arange(n + 1) * (n + 2)
        blocks.append(sp.csr_matrix(L2)[diag][:, diag].real)
    return _block_diag(blocks)


# ---------------------------------------------------------------------------
# eigen-solver


@dataclass
class EigenSolution:
    """Eigenpairs sorted by value.

    ``vectors`` holds one weighted-normalized eigenvector per column in the
    coordinates of the input matrix; ``clusters`` groups indices whose values
    agree within ``cluster_tol * max(1, |E|)``.
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    clusters: list[list[int]]
    labels: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.values)

    def cluster_values(self) -> list[float]:
        return [float(np.mean(self.values[c])) for c in self.clusters]


def cluster_values(values: np.ndarray, tol: float = TOL.cluster) -> list[list[int]]:
    """Group sorted values whose consecutive gaps are within ``tol * max(1, |E|)``."""
    order = list(range(len(values)))
    if not order:
        return []
    groups = [[order[0]]]
    for i in order[1:]:
        prev = values[groups[-1][-1]]
        if abs(values[i] - prev) <= tol * max(1.0, abs(values[i]), abs(prev)):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _as_operator(M):
    if isinstance(M, SuperMatrix):
        return M.matrix
    return M


def eigensolve(
    M,
    mask: np.ndarray | None = None,
    k: int = 6,
    which: str = "lowest",
    sigma: float | None = None,
    weights: np.ndarray | GramWeights | None = None,
    residual_tol: float = TOL.residual,
    cluster_tol: float = TOL.cluster,
    hermitian_tol: float = TOL.residual,
    dense_limit: int = 2500,
) -> EigenSolution:
    """Eigenpairs of an operator self-adjoint in a diagonal weighted product.

    ``which="lowest"`` returns the ``k`` smallest eigenvalues, ``"window"`` the
    ``k`` closest to ``sigma``.  With ``mask`` the problem is restricted to the
    masked coordinates (vectors are returned in those coordinates).
    """
    m = _as_operator(M)
    if weights is None:
        if isinstance(M, SuperMatrix) and M.space == "physical":
            weights = gram_weights(physical_basis(M.n_max), M.lam)
        else:
            weights = np.ones(m.shape[0])
    w = weights.values if isinstance(weights, GramWeights) else np.asarray(weights, dtype=float)
    if mask is not None:
        idx = np.flatnonzero(mask)
        m = m.tocsr()[idx][:, idx] if sp.issparse(m) else np.asarray(m)[np.ix_(idx, idx)]
        w = w[idx]
    if which not in ("lowest", "window"):
        raise ValueError("which must be 'lowest' or 'window'")
    if which == "window" and sigma is None:
        raise ValueError("window mode needs sigma")
    sq, isq = np.sqrt(w), 1.0 / np.sqrt(w)
    if sp.issparse(m):
        S = (sp.diags(sq) @ m @ sp.diags(isq)).tocsc()
        asym = spla.norm(S - S.conj().T)
        scale = spla.norm(S)
    else:
        S = (np.asarray(m) * sq[:, None]) * isq[None, :]
        asym = np.linalg.norm(S - S.conj().T)
        scale = np.linalg.norm(S)
    if scale > 0 and asym / scale > hermitian_tol:
        raise NonHermitianError(f"operator is not self-adjoint: relative asymmetry {asym / scale:.3e}")
    n = S.shape[0]
    k = min(k, n)
    if n <= dense_limit:
        dense = S.toarray() if sp.issparse(S) else S
        vals, vecs = sla.eigh(dense)
        if which == "lowest":
            pick = np.arange(k)
        else:
            pick = np.sort(np.argsort(np.abs(vals - sigma), kind="stable")[:k])
        vals, vecs = vals[pick], vecs[:, pick]
    else:
        if which == "lowest":
            sigma = _lower_bound(S) - 1e-3
        # a symmetric start vector hides members of degenerate multiplets
        v0 = np.random.default_rng(0).standard_normal(n)
        vals, vecs = spla.eigsh(S, k=k, sigma=sigma, which="LM", tol=0, v0=v0)
        order = np.argsort(vals, kind="stable")
        vals, vecs = vals[order], vecs[:, order]
    psi = vecs * isq[:, None]
    norms = np.sqrt(np.sum(w[:, None] * np.abs(psi) ** 2, axis=0))
    psi = psi / norms
    res = np.linalg.norm(S @ vecs - vecs * vals[None, :], axis=0) / np.linalg.norm(vecs, axis=0)
    bad = np.flatnonzero(res > residual_tol)
    if len(bad):
        raise NonConvergenceError(
            f"{len(bad)} eigenpairs exceed the residual bound {residual_tol:g}",
            {"residuals": res.tolist(), "values": vals.tolist(), "dimension": n},
        )
    return EigenSolution(vals, psi, res, cluster_values(vals, cluster_tol))


def _lower_bound(S) -> float:
    """Gershgorin lower bound of a Hermitian matrix."""
    S = sp.csr_matrix(S)
    diag = S.diagonal().real
    off = np.asarray(abs(S).sum(axis=1)).ravel() - np.abs(diag)
    return float(np.min(diag - off))
