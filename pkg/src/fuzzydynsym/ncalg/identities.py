"""Exact identity checks and the kinematic identity suite."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .algebra import LAM, ONE, GaussianRational, OperatorPoly, commutator
from .builders import (
    PAULI,
    a,
    ad,
    angular_momentum,
    b,
    bd,
    c_operator,
    commutative_coordinate,
    coordinate,
    radius,
    sym_coordinate,
)

__all__ = ["IdentityReport", "Identity", "levi_civita", "paper_identities", "run_suite", "verify_identity"]


@dataclass(frozen=True)
class IdentityReport:
    name: str
    passed: bool
    difference: OperatorPoly
    lhs_terms: int
    rhs_terms: int
    difference_terms: int
    max_denominator: int
    tag: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "difference": str(self.difference),
            "lhs_terms": self.lhs_terms,
            "rhs_terms": self.rhs_terms,
            "difference_terms": self.difference_terms,
            "max_denominator": self.max_denominator,
            "tag": self.tag,
        }


def verify_identity(lhs, rhs, name: str = "", tag: str = "") -> IdentityReport:
    """Pass iff ``lhs - rhs`` is the zero polynomial (exactly)."""
    lhs, rhs = OperatorPoly.coerce(lhs), OperatorPoly.coerce(rhs)
    diff = lhs - rhs
    return IdentityReport(
        name=name,
        passed=diff.is_zero(),
        difference=diff,
        lhs_terms=len(lhs),
        rhs_terms=len(rhs),
        difference_terms=len(diff),
        max_denominator=max(lhs.max_denominator, rhs.max_denominator, diff.max_denominator),
        tag=tag,
    )


def levi_civita(i: int, j: int, k: int) -> int:
    """Totally antisymmetric symbol on 1-based indices."""
    return (i - j) * (j - k) * (k - i) // 2


def _scal(re=0, im=0) -> OperatorPoly:
    return OperatorPoly.scalar(GaussianRational(Fraction(re), Fraction(im)))


@dataclass(frozen=True)
class Identity:
    name: str
    build: Callable[[], tuple[OperatorPoly, OperatorPoly]]
    tag: str


def _cyclic():
    return ((1, 2, 3), (2, 3, 1), (3, 1, 2))


def _spinor_rhs(j: int, alpha: int) -> OperatorPoly:
    # [L_j, a_alpha] = -1/2 sigma^j_{alpha beta} a_beta
    s = PAULI[j - 1]
    out = OperatorPoly()
    for be in (1, 2):
        out = out + OperatorPoly.scalar(s[alpha - 1][be - 1]) * a(be)
    return out * _scal(Fraction(-1, 2))


def _cospinor_rhs(j: int, alpha: int) -> OperatorPoly:
    # [L_j, a_alpha^+] = +1/2 sigma^j_{beta alpha} a_beta^+
    s = PAULI[j - 1]
    out = OperatorPoly()
    for be in (1, 2):
        out = out + OperatorPoly.scalar(s[be - 1][alpha - 1]) * ad(be)
    return out * _scal(Fraction(1, 2))


def paper_identities() -> list[Identity]:
    """Kinematic identities of the fuzzy-space construction, all exact."""
    ids: list[Identity] = []
    x = {j: coordinate(j) for j in (1, 2, 3)}
    L = {j: angular_momentum(j) for j in (1, 2, 3)}
    xh = {j: sym_coordinate(j) for j in (1, 2, 3)}
    r = radius()
    two_i_lam = _scal(0, 2) * LAM
    i1 = _scal(0, 1)

    for i, j, k in _cyclic():
        ids.append(Identity(f"[x{i},x{j}] = 2i lam x{k}", lambda i=i, j=j, k=k: (commutator(x[i], x[j]), two_i_lam * x[k]), "coordinates"))
    for j in (1, 2, 3):
        ids.append(Identity(f"[x{j},r] = 0", lambda j=j: (commutator(x[j], r), OperatorPoly()), "coordinates"))
    ids.append(Identity("r^2 - x_j x_j = lam^2", lambda: (r * r - sum((x[j] * x[j] for j in (1, 2, 3)), OperatorPoly()), LAM * LAM), "coordinates"))
    for i, j, k in _cyclic():
        ids.append(Identity(f"[L{i},L{j}] = i L{k}", lambda i=i, j=j, k=k: (commutator(L[i], L[j]), i1 * L[k]), "rotations"))
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            def build(i=i, j=j):
                rhs = OperatorPoly()
                for k in (1, 2, 3):
                    e = levi_civita(i, j, k)
                    if e:
                        rhs = rhs + _scal(0, e) * xh[k]
                return commutator(L[i], xh[j]), rhs

            ids.append(Identity(f"[L{i},xhat{j}] = i eps_{i}{j}k xhat_k", build, "rotations"))
    for j in (1, 2, 3):
        for al in (1, 2):
            ids.append(Identity(f"[L{j},a{al}] = -1/2 sigma{j} a", lambda j=j, al=al: (commutator(L[j], a(al)), _spinor_rhs(j, al)), "rotations"))
            ids.append(Identity(f"[L{j},a{al}+] = +1/2 sigma{j}^T a+", lambda j=j, al=al: (commutator(L[j], ad(al)), _cospinor_rhs(j, al)), "rotations"))
    for al in (1, 2):
        for be in (1, 2):
            d = ONE if al == be else OperatorPoly()
            ids.append(Identity(f"[a{al},a{be}+] = delta", lambda al=al, be=be, d=d: (commutator(a(al), ad(be)), d), "ladders"))
            ids.append(Identity(f"[b{al},b{be}+] = -delta", lambda al=al, be=be, d=d: (commutator(b(al), bd(be)), -d), "ladders"))
            ids.append(
                Identity(
                    f"[c{al},c{be}+] = 0",
                    lambda al=al, be=be: (commutator(c_operator(al), c_operator(be).dagger()), OperatorPoly()),
                    "commutative",
                )
            )
    for i, j, _k in _cyclic():
        ids.append(
            Identity(
                f"[x{i}c,x{j}c] = 0",
                lambda i=i, j=j: (commutator(commutative_coordinate(i), commutative_coordinate(j)), OperatorPoly()),
                "commutative",
            )
        )
    return ids


def run_suite(identities: list[Identity] | None = None) -> list[IdentityReport]:
    out = []
    for ident in identities if identities is not None else paper_identities():
        lhs, rhs = ident.build()
        out.append(verify_identity(lhs, rhs, name=ident.name, tag=ident.tag))
    return out
