"""Named operators of the fuzzy-space kinematics as exact polynomials.

A *one-sided word* is a polynomial in the abstract ``a_alpha, a_alpha^+``; it
is stored as an :class:`OperatorPoly` over the left family only.  Lifting
turns it into a superoperator on operator wave functions:

* ``lift_left(w)``  is ``Psi -> w Psi``  (homomorphism onto the a-hat family),
* ``lift_right(w)`` is ``Psi -> Psi w``  (anti-homomorphism onto the b-hat family).

Every hatted operator below is built through these two maps, so no caller has
to reason about operator orderings by hand.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import (
    GaussianRational,
    LAM,
    ONE,
    OperatorPoly,
    ZERO,
    generator,
    multiply,
)

__all__ = [
    "PAULI",
    "a",
    "ad",
    "adjoint_action",
    "b",
    "bd",
    "c_operator",
    "commutative_coordinate",
    "coordinate",
    "angular_momentum",
    "lift_left",
    "lift_right",
    "number_operator",
    "one_sided",
    "radius",
    "sym_coordinate",
]

_ONE = Fraction(1)
_Z = GaussianRational()
_R1 = GaussianRational(_ONE)
_I1 = GaussianRational(Fraction(0), _ONE)

# sigma_1, sigma_2, sigma_3; PAULI[j][alpha][beta] with 0-based alpha, beta
PAULI = (
    ((_Z, _R1), (_R1, _Z)),
    ((_Z, -_I1), (_I1, _Z)),
    ((_R1, _Z), (_Z, -_R1)),
)


def _axis(j: int) -> int:
    if j not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {j!r}")
    return j - 1


def _mode(alpha: int) -> int:
    if alpha not in (1, 2):
        raise ValueError(f"mode must be 1 or 2, got {alpha!r}")
    return alpha


def a(alpha: int) -> OperatorPoly:
    return OperatorPoly.from_generator(generator(f"aL{_mode(alpha)}"))


def ad(alpha: int) -> OperatorPoly:
    return OperatorPoly.from_generator(generator(f"aL{_mode(alpha)}d"))


def b(alpha: int) -> OperatorPoly:
    return OperatorPoly.from_generator(generator(f"bR{_mode(alpha)}"))


def bd(alpha: int) -> OperatorPoly:
    return OperatorPoly.from_generator(generator(f"bR{_mode(alpha)}d"))


def one_sided(p: OperatorPoly) -> OperatorPoly:
    """Validate that ``p`` only uses the abstract (left) ladder symbols."""
    for (_, word), _c in p.items():
        if any(word[2:4]) or any(word[6:8]):
            raise ValueError("one-sided words may only contain a_alpha and a_alpha^+")
    return p


def lift_left(word: OperatorPoly) -> OperatorPoly:
    """Left multiplication superoperator; the identity on the symbol level."""
    return one_sided(OperatorPoly.coerce(word))


def lift_right(word: OperatorPoly) -> OperatorPoly:
    """Right multiplication superoperator ``Psi -> Psi word``.

    ``Psi (x y) = y_R (x_R Psi)``, so each canonical word ``C A`` is replaced by
    the reversed product of right-family images, then re-normal-ordered.
    """
    word = one_sided(OperatorPoly.coerce(word))
    out = ZERO
    for (lam_pow, exps), c in word.items():
        # written order of the canonical word: aL1d aL2d aL1 aL2 (with powers)
        factors = []
        for alpha, e in ((1, exps[0]), (2, exps[1])):
            factors += [bd(alpha)] * e
        for alpha, e in ((1, exps[4]), (2, exps[5])):
            factors += [b(alpha)] * e
        term = OperatorPoly.scalar(c, lam_pow)
        for f in reversed(factors):
            term = multiply(term, f)
        out = out + term
    return out


def adjoint_action(word: OperatorPoly) -> OperatorPoly:
    """Superoperator ``Psi -> [word, Psi]``."""
    return lift_left(word) - lift_right(word)


def _bilinear(j: int) -> OperatorPoly:
    """One-sided ``a^+ sigma_j a = sigma^j_{alpha beta} a_alpha^+ a_beta``."""
    s = PAULI[_axis(j)]
    out = ZERO
    for al in (1, 2):
        for be in (1, 2):
            c = s[al - 1][be - 1]
            if c:
                out = out + multiply(ad(al), a(be)) * OperatorPoly.scalar(c)
    return out


def coordinate(j: int, side: str = "left") -> OperatorPoly:
    """``x_j = lam a^+ sigma_j a`` acting from the left or from the right."""
    w = LAM * _bilinear(j)
    if side == "left":
        return lift_left(w)
    if side == "right":
        return lift_right(w)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def number_operator(side: str = "left") -> OperatorPoly:
    w = multiply(ad(1), a(1)) + multiply(ad(2), a(2))
    return lift_left(w) if side == "left" else lift_right(w)


def radius(side: str = "left") -> OperatorPoly:
    """``r = lam (N + 1)``."""
    return LAM * (number_operator(side) + ONE)


def angular_momentum(j: int) -> OperatorPoly:
    """``L_j Psi = 1/2 [a^+ sigma_j a, Psi]``."""
    return adjoint_action(_bilinear(j)) / 2


def sym_coordinate(j: int) -> OperatorPoly:
    """``x-hat_j Psi = 1/2 (x_j Psi + Psi x_j)``."""
    return (coordinate(j, "left") + coordinate(j, "right")) / 2


def c_operator(alpha: int) -> OperatorPoly:
    """``c_alpha = (a-hat_alpha + b-hat_alpha) / 2``."""
    return (a(alpha) + b(alpha)) / 2


def commutative_coordinate(i: int) -> OperatorPoly:
    """``x_ic = sigma^i_{alpha beta} c_alpha^+ c_beta`` (no length factor)."""
    s = PAULI[_axis(i)]
    out = ZERO
    for al in (1, 2):
        for be in (1, 2):
            coef = s[al - 1][be - 1]
            if coef:
                cd = c_operator(al).dagger()
                out = out + multiply(cd, c_operator(be)) * OperatorPoly.scalar(coef)
    return out
