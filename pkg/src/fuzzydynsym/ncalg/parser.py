"""Text grammar for operator expressions.

Identifiers: ``aL1 aL2 aL1d aL2d bR1 bR2 bR1d bR2d lam i``; operators
``+ - * / ^`` (``**`` also accepted); builtins ``comm(p, q)``, ``adj(p)``,
``x(j)``, ``xh(j)``, ``r``, ``N``, ``L(j)``, ``c(alpha)``, ``xc(i)``.
A statement ``lhs == rhs`` is an identity to verify.

Parsing goes through :mod:`ast` with a node whitelist; nothing is ``eval``-ed.
"""

from __future__ import annotations

import ast
from fractions import Fraction

from .algebra import GENERATORS, I, LAM, OperatorPoly, adjoint, commutator
from .builders import (
    angular_momentum,
    c_operator,
    commutative_coordinate,
    coordinate,
    number_operator,
    radius,
    sym_coordinate,
)

__all__ = ["ExpressionError", "parse_expression", "parse_statement"]


class ExpressionError(ValueError):
    """Malformed or unsupported operator expression."""


_NAMES = {g.name: OperatorPoly.from_generator(g) for g in GENERATORS}
_NAMES.update({"lam": LAM, "i": I, "r": None, "N": None})

_FUNCS = {
    "x": lambda j: coordinate(j, "left"),
    "xh": sym_coordinate,
    "L": angular_momentum,
    "c": c_operator,
    "xc": commutative_coordinate,
}


def _int_arg(node: ast.AST) -> int:
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return node.value
    raise ExpressionError("builtin index arguments must be integer literals")


def _eval(node: ast.AST):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, int):
            raise ExpressionError(f"only integer literals are allowed, got {node.value!r}")
        return Fraction(node.value)
    if isinstance(node, ast.Name):
        if node.id == "r":
            return radius()
        if node.id == "N":
            return number_operator()
        if node.id in _NAMES:
            return _NAMES[node.id]
        raise ExpressionError(f"unknown identifier {node.id!r}")
    if isinstance(node, ast.UnaryOp):
        val = _eval(node.operand)
        if isinstance(node.op, ast.USub):
            return -val
        if isinstance(node.op, ast.UAdd):
            return val
        raise ExpressionError("unsupported unary operator")
    if isinstance(node, ast.BinOp):
        left, right = _eval(node.left), _eval(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            if isinstance(left, Fraction) and isinstance(right, Fraction):
                return left * right
            return OperatorPoly.coerce(left) * OperatorPoly.coerce(right)
        if isinstance(node.op, ast.Div):
            if not isinstance(right, Fraction):
                raise ExpressionError("division is only allowed by integer/rational constants")
            if right == 0:
                raise ExpressionError("division by zero")
            return left / right if isinstance(left, Fraction) else OperatorPoly.coerce(left) / right
        if isinstance(node.op, (ast.Pow, ast.BitXor)):
            if not (isinstance(right, Fraction) and right.denominator == 1 and right >= 0):
                raise ExpressionError("exponents must be non-negative integers")
            if isinstance(left, Fraction):
                return left ** int(right)
            return OperatorPoly.coerce(left) ** int(right)
        raise ExpressionError("unsupported binary operator")
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.keywords:
            raise ExpressionError("only plain builtin calls are allowed")
        name = node.func.id
        if name == "comm":
            if len(node.args) != 2:
                raise ExpressionError("comm takes two arguments")
            p, q = (OperatorPoly.coerce(_eval(arg)) for arg in node.args)
            return commutator(p, q)
        if name == "adj":
            if len(node.args) != 1:
                raise ExpressionError("adj takes one argument")
            return adjoint(OperatorPoly.coerce(_eval(node.args[0])))
        if name in _FUNCS:
            if len(node.args) != 1:
                raise ExpressionError(f"{name} takes one argument")
            try:
                return _FUNCS[name](_int_arg(node.args[0]))
            except ValueError as exc:
                raise ExpressionError(str(exc)) from None
        raise ExpressionError(f"unknown builtin {name!r}")
    raise ExpressionError(f"unsupported syntax: {type(node).__name__}")


def _parse(text: str, mode: str = "eval") -> ast.AST:
    try:
        return ast.parse(text.strip(), mode=mode)
    except SyntaxError as exc:
        raise ExpressionError(f"syntax error in {text!r}: {exc.msg}") from None


def parse_expression(text: str) -> OperatorPoly:
    """Parse and normal-order one operator expression."""
    return OperatorPoly.coerce(_eval(_parse(text)))


def parse_statement(text: str) -> tuple[OperatorPoly, OperatorPoly]:
    """Parse ``lhs == rhs``; a bare expression is compared with zero."""
    tree = _parse(text)
    body = tree.body
    if isinstance(body, ast.Compare):
        if len(body.ops) != 1 or not isinstance(body.ops[0], ast.Eq):
            raise ExpressionError("statements must have the form lhs == rhs")
        return OperatorPoly.coerce(_eval(body.left)), OperatorPoly.coerce(_eval(body.comparators[0]))
    return OperatorPoly.coerce(_eval(body)), OperatorPoly()
