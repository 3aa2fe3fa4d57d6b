"""Exact normal-ordered algebra of the left/right ladder generators."""

from .algebra import (
    GENERATORS,
    GaussianRational,
    Generator,
    I,
    LAM,
    ONE,
    OperatorPoly,
    ZERO,
    adjoint,
    commutator,
    format_poly,
    generator,
    multiply,
)
from .builders import (
    PAULI,
    a,
    ad,
    adjoint_action,
    angular_momentum,
    b,
    bd,
    c_operator,
    commutative_coordinate,
    coordinate,
    lift_left,
    lift_right,
    number_operator,
    radius,
    sym_coordinate,
)
from .identities import IdentityReport, levi_civita, paper_identities, run_suite, verify_identity
from .parser import ExpressionError, parse_expression, parse_statement
from .rewrite import Product, Sum, expand, first_redex, last_redex, normal_order, random_redex

__all__ = [
    "GENERATORS",
    "ExpressionError",
    "GaussianRational",
    "Generator",
    "I",
    "IdentityReport",
    "LAM",
    "ONE",
    "OperatorPoly",
    "PAULI",
    "Product",
    "Sum",
    "ZERO",
    "a",
    "ad",
    "adjoint",
    "adjoint_action",
    "angular_momentum",
    "b",
    "bd",
    "c_operator",
    "commutative_coordinate",
    "commutator",
    "coordinate",
    "expand",
    "first_redex",
    "format_poly",
    "generator",
    "last_redex",
    "levi_civita",
    "lift_left",
    "lift_right",
    "multiply",
    "normal_order",
    "number_operator",
    "paper_identities",
    "parse_expression",
    "parse_statement",
    "radius",
    "random_redex",
    "run_suite",
    "sym_coordinate",
    "verify_identity",
]
