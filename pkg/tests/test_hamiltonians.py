import numpy as np
import pytest
import scipy.sparse as sp

from fuzzydynsym.fockrep import enumerate_basis, hermitian_check, represent
from fuzzydynsym.hamiltonians import (
    ModelParams,
    NonConvergenceError,
    NonHermitianError,
    angular_momentum_superop,
    coulomb_hamiltonian,
    double_commutator,
    eigensolve,
    inverse_r,
    laplacian,
    m0_casimir,
    m0_hamiltonian,
    m0_indices,
    nc_laplace_residual,
    physical_identity,
    position_superop,
    radius_superop,
    velocity,
)
from fuzzydynsym.ncalg import ONE, a, ad, adjoint_action, commutator, lift_left
from fuzzydynsym.symmetry import EPS


def _dense(M):
    m = M.matrix if hasattr(M, "matrix") else M
    return m.toarray() if sp.issparse(m) else np.asarray(m)


def _rel_block(m, mask, ref=None):
    """Frobenius norm of ``m`` on the masked block relative to ``ref`` (or 1)."""
    idx = np.flatnonzero(mask)
    block = _dense(m)[np.ix_(idx, idx)]
    scale = 1.0 if ref is None else max(np.linalg.norm(_dense(ref)[np.ix_(idx, idx)]), 1e-300)
    return np.linalg.norm(block) / scale


def _comm(x, y):
    return x @ y - y @ x


@pytest.fixture(scope="module")
def p8():
    return ModelParams(lam=0.5, q=1.0, n_max=8)


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(lam=0.0)
    with pytest.raises(ValueError):
        ModelParams(lam=1.0, n_max=1)


def test_double_commutator_matches_exact_algebra():
    # sum_alpha [a_alpha^+, [a_alpha, .]] from the exact algebra, restricted to physical cells
    n_max = 6
    word = sum((adjoint_action(ad(al)) * adjoint_action(a(al)) for al in (1, 2)), 0 * ONE)
    full = enumerate_basis(n_max)
    M = represent(word, full, 1.0).toarray()
    phys = np.flatnonzero(full.physical)
    ref = M[np.ix_(phys, phys)]
    D = double_commutator(n_max).toarray()
    inner = np.flatnonzero(full.source_sector[phys] <= n_max - 1)
    assert np.allclose(D[np.ix_(inner, inner)], ref[np.ix_(inner, inner)], atol=1e-12)


def test_laplacian_kills_the_identity(p8):
    psi = np.where(p8.basis.diagonal, 1.0, 0.0)
    out = laplacian(p8) @ psi
    inner = p8.basis.interior(1)
    assert np.abs(out[inner]).max() <= 1e-12


def test_laplacian_of_sector_zero_projector_is_not_zero(p8):
    psi = np.zeros(p8.basis.dimension)
    psi[0] = 1.0
    assert np.linalg.norm(laplacian(p8) @ psi) > 0.1
    assert commutator(lift_left(a(1)), ONE).is_zero()


def test_laplacian_couples_neighbouring_sectors_only(p8):
    D = sp.coo_matrix(laplacian(p8).matrix)
    sec = p8.basis.sector
    gaps = np.abs(sec[D.row] - sec[D.col])
    assert gaps.max() == 1
    assert set(np.unique(gaps)) == {0, 1}


@pytest.mark.parametrize("build", [laplacian, coulomb_hamiltonian], ids=["laplacian", "hamiltonian"])
def test_weighted_self_adjoint(p8, build):
    assert hermitian_check(build(p8), p8.weights, p8.basis.interior(1)) <= 1e-10


def test_inverse_r():
    p = ModelParams(lam=0.5, q=1.0, n_max=4)
    inv = inverse_r(p)
    assert inv.matrix.diagonal()[0] == pytest.approx(2.0)
    prod = (radius_superop(p) @ inv).matrix - physical_identity(p).matrix
    assert abs(prod).max() <= 1e-15
    for j in (1, 2, 3):
        L = angular_momentum_superop(j, p).matrix
        assert abs(_comm(inv.matrix, L)).max() <= 1e-12


def test_hamiltonian_is_rotation_invariant():
    p = ModelParams(lam=0.5, q=1.0, n_max=10)
    H = coulomb_hamiltonian(p).matrix
    inner = p.basis.interior(1)
    for j in (1, 2, 3):
        L = angular_momentum_superop(j, p).matrix
        assert _rel_block(_comm(H, L), inner, H) <= 1e-10


def test_hamiltonian_is_real_with_diagonal_l3(p8):
    H = coulomb_hamiltonian(p8).matrix
    L3 = angular_momentum_superop(3, p8).matrix
    assert abs(L3 - sp.diags(L3.diagonal())).max() == 0
    assert np.isrealobj(H.data) or abs(H.imag).max() == 0
    # real symmetric after the weight similarity transform
    s = np.sqrt(p8.weights.values)
    S = sp.diags(s) @ H @ sp.diags(1 / s)
    assert abs(S - S.T).max() <= 1e-12


def test_free_spectrum_is_non_negative():
    p = ModelParams(lam=0.5, q=0.0, n_max=8)
    sol = eigensolve(coulomb_hamiltonian(p), k=5)
    assert sol.values.min() >= -1e-10


def test_bound_states_for_attraction():
    p = ModelParams(lam=0.5, q=1.0, n_max=12)
    sol = eigensolve(coulomb_hamiltonian(p), k=10)
    levels = sol.cluster_values()
    assert levels[0] < 0
    assert levels[0] == pytest.approx(-0.47193214, abs=1e-7)
    assert all(e1 < e2 for e1, e2 in zip(levels, levels[1:]))


def test_position_operators(p8):
    inner = p8.basis.interior(1)
    X = {k: position_superop(k, p8).matrix for k in (1, 2, 3)}
    L = {k: angular_momentum_superop(k, p8).matrix for k in (1, 2, 3)}
    for k in (1, 2, 3):
        assert hermitian_check(X[k], p8.weights, inner) <= 1e-13
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            rhs = sum(1j * EPS[i - 1, j - 1, k - 1] * X[k] for k in (1, 2, 3))
            assert _rel_block(_comm(L[i], X[j]) - rhs, inner, X[j]) <= 1e-12


def test_radius_identity(p8):
    # sum x-hat^2 + lam^2 (L^2 + 1) = r^2 on symmetrized multiplication
    X = [position_superop(k, p8).matrix for k in (1, 2, 3)]
    L = [angular_momentum_superop(k, p8).matrix for k in (1, 2, 3)]
    r = radius_superop(p8).matrix
    one = physical_identity(p8).matrix
    lam2 = p8.lam**2
    inner = p8.basis.interior(1)
    corrected = sum(x @ x for x in X) + lam2 * (sum(l @ l for l in L) + one) - r @ r
    assert _rel_block(corrected, inner, r @ r) <= 1e-12
    literal = sum(x @ x for x in X) + lam2 * one - r @ r
    assert _rel_block(literal, inner, r @ r) > 1e-2


def test_velocity(p8):
    H = coulomb_hamiltonian(p8)
    potential = inverse_r(p8) * (-p8.q)
    V = {i: velocity(i, H, p8).matrix for i in (1, 2, 3)}
    L = {k: angular_momentum_superop(k, p8).matrix for k in (1, 2, 3)}
    for i in (1, 2, 3):
        assert abs(velocity(i, potential, p8).matrix).max() <= 1e-12
        assert hermitian_check(V[i], p8.weights, p8.basis.interior(2)) <= 1e-10
        assert spla_norm(V[i]) > 0.1
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            rhs = sum(1j * EPS[i - 1, j - 1, k - 1] * V[k] for k in (1, 2, 3))
            assert _rel_block(_comm(L[i], V[j]) - rhs, p8.basis.interior(2), V[j]) <= 1e-10


def spla_norm(m):
    return np.linalg.norm(_dense(m))


def test_axis_validation(p8):
    with pytest.raises(ValueError):
        position_superop(0, p8)
    with pytest.raises(ValueError):
        angular_momentum_superop(4, p8)


# ---------------------------------------------------------------------------
# eigen-solver


def test_eigensolve_identity():
    sol = eigensolve(np.eye(4), k=3)
    assert np.allclose(sol.values, 1.0)
    assert sol.clusters == [[0, 1, 2]]


def test_eigensolve_diagonal_lowest_two():
    sol = eigensolve(np.diag([3.0, 1.0, 2.0]), k=2)
    assert np.allclose(sol.values, [1.0, 2.0])
    assert np.all(sol.residuals <= 1e-8)


def test_eigensolve_window():
    sol = eigensolve(np.diag(np.arange(10.0)), k=3, which="window", sigma=6.2)
    assert np.allclose(sol.values, [5.0, 6.0, 7.0])


def test_eigensolve_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        eigensolve(np.array([[1.0, 2.0], [0.0, 1.0]]), k=1)


def test_eigensolve_reports_non_convergence():
    with pytest.raises(NonConvergenceError) as err:
        eigensolve(np.diag([1.0, 2.0, 3.0]), k=2, residual_tol=-1.0)
    assert "residuals" in err.value.diagnostics


def test_eigensolve_sparse_path_matches_dense():
    p = ModelParams(lam=0.5, q=1.0, n_max=14)
    H = coulomb_hamiltonian(p)
    dense = eigensolve(H, k=6)
    sparse = eigensolve(H, k=6, dense_limit=0)
    assert np.allclose(dense.values, sparse.values, atol=1e-10)


# ---------------------------------------------------------------------------
# radial harmonic functions


def test_nc_laplace_constant():
    p = ModelParams(lam=0.5, q=1.0, n_max=10)
    res = nc_laplace_residual(np.ones(11), p)
    assert res[:-1].max() <= 1e-12


def test_nc_laplace_inverse_r_harmonic_away_from_origin():
    p = ModelParams(lam=0.5, q=1.0, n_max=10)
    res = nc_laplace_residual(lambda r: 1.0 / r, p)
    assert res[1 : p.n_max - 1].max() <= 1e-10
    assert res[0] > 1.0  # source at the origin sector


def test_nc_laplace_r_is_not_harmonic():
    p = ModelParams(lam=0.5, q=1.0, n_max=10)
    res = nc_laplace_residual(lambda r: r, p)
    assert res[1 : p.n_max - 1].min() > 0.1


def test_nc_laplace_length_check():
    with pytest.raises(ValueError):
        nc_laplace_residual([1.0, 2.0], ModelParams(lam=1.0, n_max=4))


# ---------------------------------------------------------------------------
# reduction to diagonal operator wave functions


def test_m0_reduction_matches_full_solve():
    p = ModelParams(lam=0.5, q=1.0, n_max=10)
    H = coulomb_hamiltonian(p)
    full = eigensolve(H, k=len(np.flatnonzero(p.basis.diagonal)) + 40)
    Hm, w = m0_hamiltonian(p)
    red = eigensolve(Hm, k=Hm.shape[0], weights=w)
    # diagonal blocks form an invariant subspace
    idx = m0_indices(p)
    assert np.allclose(Hm.toarray(), _dense(H)[np.ix_(idx, idx)], atol=1e-14)
    for e in red.values[:10]:
        assert np.min(np.abs(full.values - e)) <= 1e-10


def test_m0_casimir_values():
    # each diagonal level carries an integer l with L^2 = l (l + 1)
    p = ModelParams(lam=0.5, q=1.0, n_max=6)
    Hm, w = m0_hamiltonian(p)
    C = m0_casimir(p.n_max).toarray()
    vals = np.linalg.eigvalsh(C)
    ell = (-1 + np.sqrt(1 + 4 * vals)) / 2
    assert np.allclose(ell, np.round(ell), atol=1e-10)
    assert abs(_comm(Hm.toarray(), C)).max() <= 1e-12
