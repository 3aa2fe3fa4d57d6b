from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzydynsym.fockrep import enumerate_basis, represent
from fuzzydynsym.ncalg import (
    GENERATORS,
    LAM,
    ONE,
    ZERO,
    ExpressionError,
    GaussianRational,
    OperatorPoly,
    Product,
    Sum,
    a,
    ad,
    adjoint,
    adjoint_action,
    angular_momentum,
    b,
    bd,
    c_operator,
    commutative_coordinate,
    commutator,
    coordinate,
    first_redex,
    last_redex,
    lift_left,
    lift_right,
    multiply,
    normal_order,
    number_operator,
    parse_expression,
    parse_statement,
    radius,
    random_redex,
    run_suite,
    sym_coordinate,
    verify_identity,
)
from fuzzydynsym.ncalg.algebra import I

TWO_I_LAM = OperatorPoly.scalar(GaussianRational(Fraction(0), Fraction(2))) * LAM


def test_normal_order_ccr_left():
    assert normal_order(Product(a(1), ad(1))) == ad(1) * a(1) + 1


def test_normal_order_ccr_right_has_opposite_sign():
    assert normal_order(Product(b(1), bd(1))) == bd(1) * b(1) - 1


def test_normal_order_fixed_point():
    word = ad(1) * a(1)
    assert normal_order(Product(ad(1), a(1))) == word
    assert len(word) == 1


def test_multiply_examples():
    p = ad(2) * a(1) + 3
    assert multiply(ZERO, p).is_zero()
    assert multiply(LAM, LAM) == OperatorPoly.scalar(1, lam_power=2)
    assert multiply(a(1), ad(1)) == normal_order(Product(a(1), ad(1)))


def test_commutator_examples():
    x1, x2, x3 = (coordinate(j) for j in (1, 2, 3))
    assert commutator(x1, x2) == TWO_I_LAM * x3
    assert commutator(x1, x1).is_zero()
    assert commutator(x3, radius()).is_zero()


def test_adjoint_examples():
    assert adjoint(a(1)) == ad(1)
    assert adjoint(I) == -I
    for j in (1, 2, 3):
        assert adjoint(coordinate(j)) == coordinate(j)


def test_coordinate_explicit_forms():
    assert coordinate(3) == LAM * (ad(1) * a(1) - ad(2) * a(2))
    assert coordinate(1) == LAM * (ad(1) * a(2) + ad(2) * a(1))
    assert coordinate(2) == LAM * (-I * ad(1) * a(2) + I * ad(2) * a(1))


def test_coordinate_rejects_bad_axis():
    with pytest.raises(ValueError):
        coordinate(4)


def test_lifts():
    assert lift_left(ad(1) * a(1)) == ad(1) * a(1)
    assert lift_right(ad(1) * a(1)) == normal_order(Product(b(1), bd(1)))
    assert lift_left(a(1) * ad(1)) == ad(1) * a(1) + 1


def test_lift_right_matches_right_multiplication_matrix():
    # Psi -> Psi a1^+ a1 on the truncated operator space at n_max = 2
    basis = enumerate_basis(2)
    M = represent(lift_right(ad(1) * a(1)), basis, 1.0).toarray()
    a1 = basis.fock.ladders[0].toarray()
    word = a1.T @ a1
    D = basis.fock_dimension
    expected = np.zeros_like(M)
    for col in range(D * D):
        unit = np.zeros(D * D)
        unit[col] = 1
        psi = basis.unvec(unit)
        expected[:, col] = basis.vec(psi @ word)
    # the normal-ordered form differs from the truncated product only at the edge
    inner = np.flatnonzero(basis.interior(1))
    assert np.allclose(M[np.ix_(inner, inner)], expected[np.ix_(inner, inner)], atol=1e-14)
    assert not np.allclose(M, expected, atol=1e-14)


def test_lift_right_is_anti_homomorphism():
    p, q = ad(1) * a(2), a(1) + ad(2) * ad(2)
    assert lift_right(p * q) == lift_right(q) * lift_right(p)
    assert lift_left(p * q) == lift_left(p) * lift_left(q)


def test_lift_rejects_right_family_words():
    with pytest.raises(ValueError):
        lift_left(b(1))


def test_adjoint_action_examples():
    L = {j: angular_momentum(j) for j in (1, 2, 3)}
    assert commutator(L[1], L[2]) == I * L[3]
    assert adjoint_action(ONE).is_zero()
    assert commutator(L[1], sym_coordinate(2)) == I * sym_coordinate(3)


def test_c_operator_examples():
    c1, c2 = c_operator(1), c_operator(2)
    assert c1 == (a(1) + b(1)) / 2
    assert commutator(c1, adjoint(c2)).is_zero()
    assert commutator(c1, adjoint(c1)).is_zero()
    assert commutator(c1, c2).is_zero()
    assert commutator(commutative_coordinate(1), commutative_coordinate(2)).is_zero()


def test_verify_identity_examples():
    x = [coordinate(j) for j in (1, 2, 3)]
    r = radius()
    assert r == LAM * (number_operator() + 1)
    assert verify_identity(r * r - sum((xj * xj for xj in x), ZERO), LAM * LAM).passed
    bad = verify_identity(x[0], x[1])
    assert not bad.passed
    assert not bad.difference.is_zero()
    assert bad.difference_terms == len(bad.difference) > 0


def _spinor_rhs(j, alpha, factor):
    from fuzzydynsym.ncalg import PAULI

    out = ZERO
    for beta in (1, 2):
        s = PAULI[j - 1][alpha - 1][beta - 1]
        if s:
            out = out + factor * OperatorPoly.scalar(s) * a(beta)
    return out


def test_spinor_law_carries_half_not_half_i():
    # [L_j, a_alpha] = -1/2 sigma^j a holds; the variant with an extra factor i does not
    half = OperatorPoly.scalar(Fraction(-1, 2))
    for j in (1, 2, 3):
        for alpha in (1, 2):
            lhs = commutator(angular_momentum(j), a(alpha))
            assert verify_identity(lhs, _spinor_rhs(j, alpha, half)).passed
            assert not verify_identity(lhs, _spinor_rhs(j, alpha, half * I)).passed


def test_identity_suite_passes_exactly():
    reports = run_suite()
    assert len(reports) == 46
    failed = [r.name for r in reports if not r.passed]
    assert failed == []
    assert all(r.difference.is_zero() for r in reports)
    assert max(r.max_denominator for r in reports) <= 4


def test_suite_covers_every_family():
    tags = {r.tag for r in run_suite()}
    assert {"coordinates", "rotations", "ladders", "commutative"} <= tags


# ---------------------------------------------------------------------------
# randomized properties

@st.composite
def expr_trees(draw, max_degree=6):
    """Random sum-of-products tree of total degree at most ``max_degree``."""
    n_terms = draw(st.integers(1, 3))
    terms = []
    for _ in range(n_terms):
        deg = draw(st.integers(0, max_degree))
        gens = draw(st.lists(st.sampled_from(GENERATORS), min_size=deg, max_size=deg))
        coef = GaussianRational(Fraction(draw(st.integers(-3, 3))), Fraction(draw(st.integers(-2, 2))))
        terms.append(Product(coef, *gens))
    return Sum(*terms)


@st.composite
def polys(draw, max_degree=3):
    tree = draw(expr_trees(max_degree))
    return normal_order(tree)


@settings(max_examples=200, deadline=None)
@given(expr_trees(), st.integers(0, 10**6))
def test_confluence_under_rewrite_schedules(tree, seed):
    fold = normal_order(tree)
    assert normal_order(tree, first_redex) == fold
    assert normal_order(tree, last_redex) == fold
    assert normal_order(tree, random_redex(seed)) == fold


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p + q) * r == p * r + q * r


@settings(max_examples=40, deadline=None)
@given(polys(2), polys(2), polys(2))
def test_jacobi(p, q, r):
    total = commutator(p, commutator(q, r)) + commutator(q, commutator(r, p)) + commutator(r, commutator(p, q))
    assert total.is_zero()


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_adjoint_reverses_products(p, q):
    assert adjoint(adjoint(p)) == p
    assert adjoint(p * q) == adjoint(q) * adjoint(p)


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_commutator_antisymmetric(p, q):
    assert commutator(p, q) == -commutator(q, p)


# ---------------------------------------------------------------------------
# parser


def test_parse_expression_builtins():
    assert parse_expression("x(3)") == coordinate(3)
    assert parse_expression("comm(x(1), x(2))") == TWO_I_LAM * coordinate(3)
    assert parse_expression("aL1*aL1d") == ad(1) * a(1) + 1
    assert parse_expression("r^2") == radius() * radius()
    assert parse_expression("adj(aL1)") == ad(1)


def test_parse_statement_identity():
    lhs, rhs = parse_statement("comm(L(1), L(2)) == i*L(3)")
    assert verify_identity(lhs, rhs).passed


@pytest.mark.parametrize("text", ["__import__('os')", "x(7)", "aL3", "1 +", "open('f')"])
def test_parser_rejects_bad_input(text):
    with pytest.raises(ExpressionError):
        parse_expression(text)
