"""Lenz vector, dynamical-symmetry closure, Casimirs and the energy formula.

Algebraic identities are checked on eigenspaces.  An eigenspace is a set
of weighted-orthonormal physical vectors ``Phi`` with a common energy; every
projected product ``Phi^+ W X Y Phi`` is evaluated as the Gram matrix
``(X Phi)^+ W (Y Phi)``, which is exact because the truncated ``L``, ``x``,
``H`` and therefore ``A`` are self-adjoint in the weighted product.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .config import TOL, UNITS
from .fockrep import SuperMatrix, gram_weights, physical_basis
from .hamiltonians import (
    EigenSolution,
    ModelParams,
    angular_momentum_superop,
    coulomb_hamiltonian,
    eigensolve,
    inverse_r,
    m0_casimir,
    m0_hamiltonian,
    m0_indices,
    m0_sectors,
    position_superop,
    velocity,
)

__all__ = [
    "REPORT_SCHEMA_VERSION",
    "BoundaryError",
    "ClusterRecord",
    "Eigenspace",
    "LenzAlgebra",
    "Regime",
    "SymmetryReport",
    "casimir_from_energy",
    "casimirs",
    "classify_regime",
    "conservation_check",
    "degeneracy_check",
    "energy_formula",
    "hydrogen_limit_study",
    "lenz_coefficient",
    "lenz_commutator_check",
    "lrl_vector",
    "m0_eigenspaces",
    "m0_eigenspaces_light",
    "eigenspaces_from_solution",
    "CommutatorCheck",
    "CasimirValues",
    "SU2Check",
    "LevelMultiplicity",
    "HydrogenLimitRow",
    "HydrogenLimitStudy",
    "analyze_space",
    "EPS",
    "PAIRS",
    "rescale_K",
    "su2_decompose",
    "symmetry_report",
]

REPORT_SCHEMA_VERSION = "1.0"
EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    EPS[_i, _j, _k], EPS[_j, _i, _k] = 1.0, -1.0
PAIRS = ((0, 1, 2), (1, 2, 0), (2, 0, 1))  # (i, j, k) with eps_ijk = +1


class BoundaryError(ValueError):
    """Energy sits in the E(3) band where the rescaling is singular."""


class Regime(str, Enum):
    SO4 = "SO4"
    SO31 = "SO31"
    E3 = "E3"


def lenz_coefficient(E: float, lam: float) -> float:
    """``-2E + lam^2 E^2``, the scalar in ``[A_i, A_j] = i c eps_ijk L_k``."""
    return -2.0 * E + lam**2 * E**2


def classify_regime(E: float, lam: float, band: float | None = None) -> Regime:
    """SO4 below 0 or above ``2/lam^2``, SO31 in between, E3 within ``band`` of either edge.

    ``band`` defaults to ``1e-9 * 2/lam^2``.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    top = 2.0 / lam**2
    eps = TOL.boundary_band * top if band is None else band
    if abs(E) <= eps or abs(E - top) <= eps:
        return Regime.E3
    if E < 0 or E > top:
        return Regime.SO4
    return Regime.SO31


def energy_formula(n: int, lam: float, q: float = 1.0, branch: str = "low") -> float:
    """Bound energy ``(1/lam^2)(1 -+ sqrt(1 + (q lam / n)^2))``."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    root = math.sqrt(1.0 + (q * lam / n) ** 2)
    if branch == "low":
        # 1 - sqrt(1 + k^2) = -k^2 / (1 + sqrt(1 + k^2)) avoids cancellation for small lam
        return -((q / n) ** 2) / (1.0 + root)
    if branch == "ultra":
        return (1.0 + root) / lam**2
    raise ValueError("branch must be 'low' or 'ultra'")


def casimir_from_energy(E: float, lam: float, q: float = 1.0) -> float:
    """``q^2 / (lam^2 E^2 - 2E)``, the value of ``C_2`` an energy implies."""
    return q**2 / lenz_coefficient(E, lam)


# ---------------------------------------------------------------------------
# operators


class LenzAlgebra:
    """``L_k``, ``x_k``, ``V_k`` and ``A_k`` of one model, applied matrix-free.

    ``A_k = 1/2 eps_ijk (L_i V_j + V_j L_i) + q x_k / r``.  Assembling ``A``
    as a sparse matrix is only needed for whole-space checks; eigenspace
    checks only apply it to a handful of vectors.
    """

    def __init__(self, params: ModelParams, H: SuperMatrix | None = None, units=UNITS):
        self.params = params
        self.H = coulomb_hamiltonian(params, units) if H is None else H
        self.h = self.H.matrix.tocsr()
        self.L = [angular_momentum_superop(k, params).matrix for k in (1, 2, 3)]
        self.x = [position_superop(k, params).matrix for k in (1, 2, 3)]
        self.inv_r = inverse_r(params).matrix
        self.w = params.weights.values

    def V(self, i: int, v: np.ndarray) -> np.ndarray:
        x, h = self.x[i], self.h
        return -1j * (x @ (h @ v) - h @ (x @ v))

    def apply_L(self, k: int, v: np.ndarray) -> np.ndarray:
        return self.L[k] @ v

    def apply_A(self, k: int, v: np.ndarray) -> np.ndarray:
        out = self.params.q * (self.x[k] @ (self.inv_r @ v))
        for i in range(3):
            for j in range(3):
                e = EPS[i, j, k]
                if e:
                    out = out + 0.5 * e * (self.L[i] @ self.V(j, v) + self.V(j, self.L[i] @ v))
        return out

    def matrix_A(self, k: int) -> sp.csr_matrix:
        V = [velocity(i + 1, self.H, self.params).matrix for i in range(3)]
        out = self.params.q * (self.x[k] @ self.inv_r)
        for i in range(3):
            for j in range(3):
                e = EPS[i, j, k]
                if e:
                    out = out + 0.5 * e * (self.L[i] @ V[j] + V[j] @ self.L[i])
        return sp.csr_matrix(out)

    def gram(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return X.conj().T @ (self.w[:, None] * Y)


def lrl_vector(k: int, H: SuperMatrix, params: ModelParams) -> SuperMatrix:
    """Sparse matrix of the symmetrized Lenz component ``A_k`` (``k`` in 1..3)."""
    if k not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {k!r}")
    return H.with_matrix(LenzAlgebra(params, H).matrix_A(k - 1))


def _operator_norm(m, sqrt_w: np.ndarray) -> float:
    """Largest singular value of ``W^(1/2) m W^(-1/2)``, the weighted operator norm."""
    m = sp.diags(sqrt_w) @ sp.csr_matrix(m) @ sp.diags(1.0 / sqrt_w)
    if m.nnz == 0:
        return 0.0
    if m.shape[0] <= 3000:
        return float(np.linalg.norm(m.toarray(), 2))
    return float(spla.svds(m, k=1, return_singular_vectors=False, random_state=0)[0])


def conservation_check(
    H: SuperMatrix, A: SuperMatrix, mask: np.ndarray | None = None, weights: np.ndarray | None = None
) -> float:
    """``|[A, H]| / (|A| |H|)`` on the masked block, in the weighted operator norm.

    The commutator is formed on the whole truncated space and then
    restricted, so cells next to the cutoff belong outside ``mask``.
    The ratio lies in ``[0, 2]``.
    """
    h, a = sp.csr_matrix(H.matrix), sp.csr_matrix(A.matrix)
    if weights is None:
        weights = gram_weights(physical_basis(H.n_max), H.lam).values if H.space == "physical" else np.ones(h.shape[0])
    comm = a @ h - h @ a
    if mask is not None:
        idx = np.flatnonzero(mask)
        comm, a, h = (m[idx][:, idx] for m in (comm, a, h))
        weights = np.asarray(weights)[idx]
    sw = np.sqrt(weights)
    den = _operator_norm(a, sw) * _operator_norm(h, sw)
    num = _operator_norm(comm, sw)
    return num / den if den > 0 else num


# ---------------------------------------------------------------------------
# eigenspaces


@dataclass
class Eigenspace:
    """Weighted-orthonormal columns ``vectors`` spanning one degenerate level."""

    energy: float
    vectors: np.ndarray
    ell: list[int] = field(default_factory=list)
    boundary_weight: float = 0.0

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


def _outer_fraction(sector: np.ndarray, w: np.ndarray, vecs: np.ndarray, top: int) -> float:
    """Largest weighted-norm fraction of a column in sectors above ``top``."""
    if not vecs.size:
        return 0.0
    p = w[:, None] * np.abs(vecs) ** 2
    return float(np.max(p[sector > top].sum(axis=0) / p.sum(axis=0)))


def _boundary_weight(params: ModelParams, vecs: np.ndarray, margin: int = 2) -> float:
    return _outer_fraction(params.basis.sector, params.weights.values, vecs, params.n_max - margin)


def _multiplet(alg: LenzAlgebra, psi0: np.ndarray, ell: int) -> list[np.ndarray]:
    """``|ell, m>`` for all ``m`` from ``|ell, 0>`` by the ladders ``L_1 +- i L_2``."""
    out = [psi0]
    for sign in (1, -1):
        v = psi0
        for _ in range(ell):
            v = alg.L[0] @ v + sign * 1j * (alg.L[1] @ v)
            v = v / np.sqrt(np.real(alg.gram(v[:, None], v[:, None])[0, 0]))
            out.append(v)
    return out


def m0_eigenspaces(
    params: ModelParams,
    k: int = 6,
    which: str = "lowest",
    sigma: float | None = None,
    alg: LenzAlgebra | None = None,
    units=UNITS,
    residual_tol: float = TOL.residual,
    cluster_tol: float = TOL.cluster,
) -> tuple[list[Eigenspace], EigenSolution]:
    """Degenerate levels built from the rotation-reduced solve.

    Eigenpairs of the Hamiltonian on diagonal (``L_3 = 0``) operator wave
    functions each carry one ``ell``; the full ``2 ell + 1`` multiplet is
    regenerated with the angular ladders.  The returned solution carries
    ``labels["ell"]``.
    """
    H0, w0 = m0_hamiltonian(params, units)
    sol = eigensolve(
        H0, k=k, which=which, sigma=sigma, weights=w0, residual_tol=residual_tol, cluster_tol=cluster_tol
    )
    C = m0_casimir(params.n_max)
    l2 = np.real(np.sum(np.conj(sol.vectors) * (w0[:, None] * (C @ sol.vectors)), axis=0))
    ell = np.rint((np.sqrt(1.0 + 4.0 * np.maximum(l2, 0.0)) - 1.0) / 2.0).astype(int)
    sol.labels["ell"] = ell.tolist()
    sol.labels["ell_error"] = np.abs(l2 - ell * (ell + 1.0)).tolist()
    if alg is None:
        alg = LenzAlgebra(params, units=units)
    idx = m0_indices(params)
    spaces = []
    for cl in sol.clusters:
        cols = []
        for c in cl:
            psi0 = np.zeros(params.basis.dimension, dtype=complex)
            psi0[idx] = sol.vectors[:, c]
            cols.extend(_multiplet(alg, psi0, int(ell[c])))
        vecs = np.stack(cols, axis=1)
        spaces.append(
            Eigenspace(float(np.mean(sol.values[cl])), vecs, [int(ell[c]) for c in cl], _boundary_weight(params, vecs))
        )
    return spaces, sol


def eigenspaces_from_solution(params: ModelParams, sol: EigenSolution) -> list[Eigenspace]:
    """Group the columns of a full physical-space solution by cluster."""
    out = []
    for cl in sol.clusters:
        vecs = sol.vectors[:, cl].astype(complex)
        out.append(Eigenspace(float(np.mean(sol.values[cl])), vecs, [], _boundary_weight(params, vecs)))
    return out


# ---------------------------------------------------------------------------
# projected algebra


@dataclass
class _Images:
    L: list[np.ndarray]
    A: list[np.ndarray]
    PL: list[np.ndarray]  # projected L_k on the eigenspace
    G: dict  # (("A", i), ("A", j)) -> Gram block


def _images(alg: LenzAlgebra, space: Eigenspace) -> _Images:
    Phi = space.vectors
    L = [alg.L[k] @ Phi for k in range(3)]
    A = [np.stack([alg.apply_A(k, Phi[:, c]) for c in range(Phi.shape[1])], axis=1) for k in range(3)]
    PL = [alg.gram(Phi, Lk) for Lk in L]
    names = {("L", k): L[k] for k in range(3)} | {("A", k): A[k] for k in range(3)}
    G = {(a, b): alg.gram(X, Y) for a, X in names.items() for b, Y in names.items()}
    return _Images(L, A, PL, G)


def _fnorm(x) -> float:
    return float(np.linalg.norm(x))


@dataclass
class CommutatorCheck:
    coefficient: float  # c(E) used in the identity
    fitted: float  # least-squares c from the projected commutators
    residual: float  # |P ([A_i,A_j] - i c eps L_k) P| over the product scale
    coefficient_error: float  # |fitted - c| / |c|; nan when <L> vanishes on the space
    scale: float
    margin: int | None


def lenz_commutator_check(
    alg: LenzAlgebra, space: Eigenspace, margin: int | None = None, images: _Images | None = None
) -> CommutatorCheck:
    """Projected residual of ``[A_i, A_j] - i(-2E + lam^2 E^2) eps_ijk L_k``.

    The left projector is the eigenspace itself, or with ``margin`` its
    restriction to sectors ``<= n_max - margin``.  Truncated ``A`` couples
    neighbouring sectors only, so the truncated identity is exact on rows
    below the outermost sector and ``margin=1`` removes the hard-wall
    artefact.  The residual is measured against the Cauchy-Schwarz scale
    ``sum_(i<j) 2 |A_i Phi_l| |A_j Phi| + |c| |L_k Phi|``, which stays
    meaningful on ``ell = 0`` spaces where both sides vanish.
    """
    im = images or _images(alg, space)
    c = lenz_coefficient(space.energy, alg.params.lam)
    Phi = space.vectors
    if margin is None:
        left_A, left = im.A, Phi
    else:
        keep = (alg.params.basis.sector <= alg.params.n_max - margin)[:, None]
        left = Phi * keep
        left_A = [np.stack([alg.apply_A(k, left[:, col]) for col in range(left.shape[1])], axis=1) for k in range(3)]
    g = alg.gram
    num2 = den = fit_num = fit_den = 0.0
    for i, j, k in PAIRS:
        comm = g(left_A[i], im.A[j]) - g(left_A[j], im.A[i])
        target = 1j * g(left, im.L[k])
        num2 += _fnorm(comm - c * target) ** 2
        den += _scaled_norm(alg, left_A[i]) * _scaled_norm(alg, im.A[j])
        den += _scaled_norm(alg, left_A[j]) * _scaled_norm(alg, im.A[i])
        den += abs(c) * _scaled_norm(alg, left) * _scaled_norm(alg, im.L[k])
        fit_num += float(np.real(np.vdot(target, comm)))
        fit_den += _fnorm(target) ** 2
    tiny = 1e-24 * max(den, 1.0) ** 2
    fitted = fit_num / fit_den if fit_den > tiny else float("nan")
    coef_err = abs(fitted - c) / abs(c) if fit_den > tiny and c != 0 else float("nan")
    res = math.sqrt(num2) / den if den > 0 else math.sqrt(num2)
    return CommutatorCheck(c, fitted, res, coef_err, den, margin)


def _scaled_norm(alg: LenzAlgebra, X: np.ndarray) -> float:
    """Weighted Frobenius norm of a block of vectors."""
    return math.sqrt(max(float(np.real(np.trace(alg.gram(X, X)))), 0.0))


def rescale_K(A, E: float, lam: float, band: float | None = None):
    """``A / sqrt(|-2E + lam^2 E^2|)``; works on SuperMatrix, arrays and scalars.

    Returns the rescaled object and the regime; E(3) energies are rejected.
    """
    regime = classify_regime(E, lam, band)
    if regime is Regime.E3:
        raise BoundaryError(f"E = {E!r} lies on the E(3) boundary; K is undefined")
    s = 1.0 / math.sqrt(abs(lenz_coefficient(E, lam)))
    return A * s, regime


@dataclass
class CasimirValues:
    C1_prime: float  # <L.A>
    C2_prime: float  # <A.A> + c (<L.L> + 1)
    C1: float  # <L.K>
    C2: float  # <K.K + L.L + 1>
    C2_spread: float  # max - min of per-state C2 over the space
    L2: float
    n: int
    n_error: float


def casimirs(alg: LenzAlgebra, space: Eigenspace, images: _Images | None = None) -> CasimirValues:
    """Expectation values of both Casimirs (bare and rescaled) on an eigenspace."""
    im = images or _images(alg, space)
    d = space.dimension
    c = lenz_coefficient(space.energy, alg.params.lam)
    per_state_AA = sum(np.real(np.diag(im.G[("A", k), ("A", k)])) for k in range(3))
    per_state_LL = sum(np.real(np.diag(im.G[("L", k), ("L", k)])) for k in range(3))
    # L.A symmetrized: 1/2 (<L Phi, A Phi> + <A Phi, L Phi>)
    LA = sum(np.real(np.trace(im.G[("L", k), ("A", k)] + im.G[("A", k), ("L", k)])) / 2 for k in range(3)) / d
    AA, LL = float(np.mean(per_state_AA)), float(np.mean(per_state_LL))
    C2p = AA + c * (LL + 1.0)
    if c == 0:
        raise BoundaryError("Casimirs of K are undefined at c(E) = 0")
    per_state_C2 = per_state_AA / abs(c) + np.sign(c) * (per_state_LL + 1.0)
    C2 = AA / abs(c) + np.sign(c) * (LL + 1.0)
    C1 = LA / math.sqrt(abs(c))
    n = max(int(round(math.sqrt(max(C2, 0.0)))), 0)
    return CasimirValues(
        float(LA), float(C2p), float(C1), float(C2), float(np.ptp(per_state_C2)), LL, n, abs(math.sqrt(max(C2, 0)) - n)
    )


@dataclass
class SU2Check:
    P_closure: float
    Q_closure: float
    cross: float
    P2: float
    Q2: float
    j: float


def su2_decompose(alg: LenzAlgebra, space: Eigenspace, images: _Images | None = None) -> SU2Check:
    """Split ``L, K`` into ``P = (L + K)/2`` and ``Q = (L - K)/2`` and check both SU(2)s.

    Closure residuals are relative to the projected norm of the right-hand side.
    """
    im = images or _images(alg, space)
    c = lenz_coefficient(space.energy, alg.params.lam)
    if classify_regime(space.energy, alg.params.lam) is not Regime.SO4:
        raise ValueError("the SU(2) x SU(2) split needs an SO4 eigenspace")
    s = 1.0 / math.sqrt(c)
    Phi = space.vectors
    P = [(im.L[k] + s * im.A[k]) / 2 for k in range(3)]
    Q = [(im.L[k] - s * im.A[k]) / 2 for k in range(3)]
    g = alg.gram

    def closure(X):
        num = den = 0.0
        for i, j, k in PAIRS:
            comm = g(X[i], X[j]) - g(X[j], X[i])
            rhs = 1j * g(Phi, X[k])
            num += _fnorm(comm - rhs) ** 2
            den += _fnorm(rhs) ** 2 + _fnorm(comm) ** 2
        return math.sqrt(num / den) if den > 1e-24 else math.sqrt(num)

    cross_num = cross_den = 0.0
    for i in range(3):
        for j in range(3):
            comm = g(P[i], Q[j]) - g(Q[j], P[i])
            cross_num += _fnorm(comm) ** 2
            cross_den += _scaled_norm(alg, P[i]) * _scaled_norm(alg, Q[j])
    d = space.dimension
    P2 = sum(float(np.real(np.trace(g(P[k], P[k])))) for k in range(3)) / d
    Q2 = sum(float(np.real(np.trace(g(Q[k], Q[k])))) for k in range(3)) / d
    j = (math.sqrt(1.0 + 4.0 * max(P2, 0.0)) - 1.0) / 2.0
    return SU2Check(closure(P), closure(Q), math.sqrt(cross_num) / cross_den if cross_den else 0.0, P2, Q2, j)


# ---------------------------------------------------------------------------
# degeneracy, hydrogen limit


@dataclass
class LevelMultiplicity:
    level: int
    energy: float
    multiplicity: int
    expected: int
    converged: bool


def degeneracy_check(
    sol: EigenSolution, params: ModelParams | None = None, boundary_tol: float = TOL.cluster, max_levels: int | None = None
) -> list[LevelMultiplicity]:
    """Multiplicities of the bound clusters, in order, against ``n^2``.

    With ``labels["ell"]`` (rotation-reduced solve) each vector counts
    ``2 ell + 1`` states.  A cluster whose vectors reach the outer two
    sectors with weight above ``boundary_tol`` is marked unconverged; the
    last listed cluster is also unconverged when it may have been cut by
    ``k``.
    """
    ell = sol.labels.get("ell")
    out = []
    bound = [cl for cl in sol.clusters if np.mean(sol.values[cl]) < 0]
    for level, cl in enumerate(bound, start=1):
        mult = sum(2 * ell[c] + 1 for c in cl) if ell is not None else len(cl)
        converged = True
        if params is not None:
            if ell is None:
                sec, w = params.basis.sector, params.weights.values
            else:
                sec = m0_sectors(params.n_max)
                w = sec + 1.0
            converged = _outer_fraction(sec, w, sol.vectors[:, cl], params.n_max - 2) <= boundary_tol
        if cl[-1] == len(sol.values) - 1:
            converged = False  # the next eigenvalue was not computed
        out.append(LevelMultiplicity(level, float(np.mean(sol.values[cl])), int(mult), level * level, converged))
        if max_levels is not None and level >= max_levels:
            break
    return out


@dataclass
class HydrogenLimitRow:
    lam: float
    formula: float
    numeric: float | None
    deviation: float  # formula - (-q^2 / 2 n^2)
    numeric_deviation: float | None


@dataclass
class HydrogenLimitStudy:
    q: float
    n: int
    limit: float
    rows: list[HydrogenLimitRow]
    slope: float
    numeric_slope: float | None
    extrapolated: float


def hydrogen_limit_study(
    q: float = 1.0, n: int = 1, lams: Sequence[float] = (0.4, 0.2, 0.1, 0.04), numeric: bool = True, radius: float | None = None
) -> HydrogenLimitStudy:
    """``E(lam)`` from the formula and from the reduced solve, against ``-q^2 / 2n^2``.

    Principal labels follow ``n = 2j + 1 >= 1``.  The numeric column uses
    ``n_max = ceil(radius / lam)`` with ``radius`` default ``30 n^2 / q``
    so the wall is far outside the state.  Slopes are least-squares fits
    of ``log|E - E(0)|`` against ``log lam``.
    """
    lams = sorted((float(x) for x in lams), reverse=True)
    if len(lams) < 2 or any(x <= 0 for x in lams):
        raise ValueError("need at least two positive lambda values")
    limit = -(q**2) / (2.0 * n**2)
    radius = 30.0 * n * n / abs(q) if radius is None else radius
    rows = []
    for lam in lams:
        E = energy_formula(n, lam, q)
        num = None
        if numeric:
            params = ModelParams(lam, q, max(int(math.ceil(radius / lam)), 2))
            spaces, _ = m0_eigenspaces_light(params, k=n * (n + 1) // 2 + 2)
            num = _level_energy(spaces, n)
        rows.append(HydrogenLimitRow(lam, E, num, E - limit, None if num is None else num - limit))
    x = np.log(lams)
    slope = float(np.polyfit(x, np.log(np.abs([r.deviation for r in rows])), 1)[0])
    nslope = None
    if numeric:
        nslope = float(np.polyfit(x, np.log(np.abs([r.numeric_deviation for r in rows])), 1)[0])
    # Richardson in lam^2 from the two smallest lambdas
    (l1, e1), (l2, e2) = (lams[-2], rows[-2].formula), (lams[-1], rows[-1].formula)
    extrap = (l1**2 * e2 - l2**2 * e1) / (l1**2 - l2**2)
    return HydrogenLimitStudy(q, n, limit, rows, slope, nslope, float(extrap))


def m0_eigenspaces_light(params: ModelParams, k: int) -> tuple[list[float], EigenSolution]:
    """Cluster energies of the reduced solve, without building multiplets."""
    H0, w0 = m0_hamiltonian(params)
    sol = eigensolve(H0, k=k, weights=w0)
    return sol.cluster_values(), sol


def _level_energy(cluster_energies: list[float], n: int) -> float:
    bound = [e for e in cluster_energies if e < 0]
    if len(bound) < n:
        raise ValueError(f"only {len(bound)} bound clusters found; level {n} missing")
    return float(bound[n - 1])


# ---------------------------------------------------------------------------
# report


@dataclass
class ClusterRecord:
    energy: float
    regime: str
    dimension: int
    ell: list[int]
    multiplicity: int
    boundary_weight: float
    coefficient: float
    fitted_coefficient: float | None
    commutator_residual: float
    coefficient_error: float | None
    interior_margin: int
    interior_fitted_coefficient: float | None
    interior_residual: float
    interior_coefficient_error: float | None
    C1_prime: float
    C2_prime: float
    C1: float | None
    C2: float | None
    C2_spread: float | None
    n: int | None
    n_error: float | None
    formula_energy: float | None
    note: str = ""


@dataclass
class SymmetryReport:
    lam: float
    q: float
    n_max: int
    conservation: list[float]
    conservation_margin: int
    clusters: list[ClusterRecord]
    projector: str = (
        "weighted orthogonal projector onto each cluster eigenspace; "
        "residuals are Gram matrices (X Phi)^+ W (Y Phi)"
    )
    box_states_note: str = (
        "positive-energy clusters are truncation-box states; their energies are "
        "not physical predictions and only carry the closure test"
    )
    schema_version: str = REPORT_SCHEMA_VERSION

    def as_dict(self) -> dict:
        return _clean(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SymmetryReport":
        d = json.loads(text)
        if d.get("schema_version") != REPORT_SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema_version')!r}")
        d["clusters"] = [ClusterRecord(**c) for c in d["clusters"]]
        return cls(**d)


def _clean(x):
    """Replace non-finite floats by None and round to 12 significant digits."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, float):
        if not math.isfinite(x):
            return None
        return float(f"{x:.12g}")
    return x


def _finite(x: float) -> float | None:
    return None if math.isnan(x) else x


def analyze_space(alg: LenzAlgebra, space: Eigenspace, margin: int = 1) -> ClusterRecord:
    """Every eigenspace-level check on one cluster.

    The Lenz commutator is reported twice: with the plain eigenspace
    projector and with the left projector cut to the truncation interior.
    """
    lam, q = alg.params.lam, alg.params.q
    im = _images(alg, space)
    regime = classify_regime(space.energy, lam)
    comm = lenz_commutator_check(alg, space, images=im)
    inner = lenz_commutator_check(alg, space, margin=margin, images=im)
    d = space.dimension
    LA = sum(np.real(np.trace(im.G[("L", k), ("A", k)] + im.G[("A", k), ("L", k)])) / 2 for k in range(3)) / d
    AA = sum(np.real(np.trace(im.G[("A", k), ("A", k)])) for k in range(3)) / d
    LL = sum(np.real(np.trace(im.G[("L", k), ("L", k)])) for k in range(3)) / d
    rec = dict(
        energy=space.energy,
        regime=regime.value,
        dimension=d,
        ell=list(space.ell),
        multiplicity=d,
        boundary_weight=space.boundary_weight,
        coefficient=comm.coefficient,
        fitted_coefficient=_finite(comm.fitted),
        commutator_residual=comm.residual,
        coefficient_error=_finite(comm.coefficient_error),
        interior_margin=margin,
        interior_fitted_coefficient=_finite(inner.fitted),
        interior_residual=inner.residual,
        interior_coefficient_error=_finite(inner.coefficient_error),
        C1_prime=float(LA),
        C2_prime=float(AA + comm.coefficient * (LL + 1.0)),
        C1=None,
        C2=None,
        C2_spread=None,
        n=None,
        n_error=None,
        formula_energy=None,
    )
    if regime is not Regime.E3:
        cas = casimirs(alg, space, im)
        rec.update(C1=cas.C1, C2=cas.C2, C2_spread=cas.C2_spread)
        if regime is Regime.SO4 and space.energy < 0:
            rec.update(n=cas.n, n_error=cas.n_error, formula_energy=energy_formula(max(cas.n, 1), lam, q))
    if regime is Regime.SO31:
        rec["note"] = "truncation-box state"
    return ClusterRecord(**rec)


def symmetry_report(
    params: ModelParams,
    k: int = 8,
    box_sigma: float | None = None,
    box_k: int = 4,
    conservation_margin: int = 1,
    conservation_n_max: int | None = None,
) -> SymmetryReport:
    """Lowest ``k`` reduced eigenpairs plus box states near ``box_sigma``.

    Conservation of ``A`` is measured on a model with ``conservation_n_max``
    (default ``min(n_max, 12)``) because it needs the assembled matrices.
    """
    alg = LenzAlgebra(params)
    spaces, _ = m0_eigenspaces(params, k=k, alg=alg)
    # the last cluster may be incomplete
    spaces = spaces[:-1] if len(spaces) > 1 else spaces
    if box_sigma is not None:
        box, _ = m0_eigenspaces(params, k=box_k, which="window", sigma=box_sigma, alg=alg)
        spaces += [s for s in box if s.energy > 0]
    cons_params = ModelParams(params.lam, params.q, conservation_n_max or min(params.n_max, 12))
    H = coulomb_hamiltonian(cons_params)
    mask = cons_params.basis.interior(conservation_margin)
    cons = [conservation_check(H, lrl_vector(k3, H, cons_params), mask) for k3 in (1, 2, 3)]
    return SymmetryReport(
        params.lam, params.q, params.n_max, cons, conservation_margin, [analyze_space(alg, s) for s in spaces]
    )
