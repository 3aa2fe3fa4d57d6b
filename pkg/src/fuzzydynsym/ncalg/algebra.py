"""Exact normal-ordered polynomials in the left/right ladder generators.

Two boson modes act by left multiplication on operator wave functions
(the ``a`` family, ``[a_i, a_j^+] = delta_ij``) and two act by right
multiplication (the ``b`` family, ``[b_i, b_j^+] = -delta_ij``).  Every
polynomial is stored in a single canonical form: creation generators to the
left of annihilation generators, with the order

    aL1d aL2d bR1d bR2d aL1 aL2 bR1 bR2

Coefficients are Gaussian rationals times a power of the formal length
parameter ``lam``; nothing here ever touches a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from numbers import Rational
from typing import Iterable, Iterator, Mapping

__all__ = [
    "GENERATORS",
    "GaussianRational",
    "Generator",
    "I",
    "LAM",
    "ONE",
    "OperatorPoly",
    "ZERO",
    "adjoint",
    "commutator",
    "generator",
    "multiply",
]


@dataclass(frozen=True, slots=True)
class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not scalars")
        if isinstance(value, (int, Fraction, Rational)):
            return cls(Fraction(value), Fraction(0))
        if isinstance(value, complex):
            re, im = value.real, value.imag
            if not (float(re).is_integer() and float(im).is_integer()):
                raise TypeError("complex scalars must have integer parts to stay exact")
            return cls(Fraction(int(re)), Fraction(int(im)))
        raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __add__(self, other) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other) -> "GaussianRational":
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other) -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __mul__(self, other) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        den = o.re * o.re + o.im * o.im
        if not den:
            raise ZeroDivisionError("division by exact zero")
        num = self * o.conjugate()
        return GaussianRational(num.re / den, num.im / den)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    @property
    def denominator(self) -> int:
        """Least common denominator of both parts."""
        a, b = self.re.denominator, self.im.denominator
        return a * b // _gcd(a, b)

    def __str__(self) -> str:
        if not self.im:
            return _frac_str(self.re)
        if not self.re:
            return "i" if self.im == 1 else ("-i" if self.im == -1 else f"{_frac_str(self.im)}*i")
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        im = "i" if mag == 1 else f"{_frac_str(mag)}*i"
        return f"({_frac_str(self.re)} {sign} {im})"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


@dataclass(frozen=True, slots=True)
class Generator:
    """One of the eight ladder generators.

    ``family`` is ``"left"`` (hatted a, left multiplication) or ``"right"``
    (hatted b, right multiplication); ``mode`` is 1 or 2.
    """

    family: str
    mode: int
    daggered: bool

    def __post_init__(self):
        if self.family not in ("left", "right"):
            raise ValueError(f"family must be 'left' or 'right', got {self.family!r}")
        if self.mode not in (1, 2):
            raise ValueError(f"mode must be 1 or 2, got {self.mode!r}")

    @property
    def index(self) -> int:
        """Position in the canonical order."""
        fam = 0 if self.family == "left" else 1
        return (0 if self.daggered else 4) + 2 * fam + (self.mode - 1)

    @property
    def slot(self) -> int:
        """Boson slot 0..3 (aL1, aL2, bR1, bR2) shared by a generator and its dagger."""
        return self.index % 4

    @property
    def sign(self) -> int:
        """Value of ``[g, g^+]`` for this slot: +1 for the left family, -1 for the right."""
        return 1 if self.family == "left" else -1

    @property
    def name(self) -> str:
        stem = "aL" if self.family == "left" else "bR"
        return f"{stem}{self.mode}{'d' if self.daggered else ''}"

    def dagger(self) -> "Generator":
        return Generator(self.family, self.mode, not self.daggered)

    def __repr__(self) -> str:
        return self.name


GENERATORS: tuple[Generator, ...] = tuple(
    sorted(
        (Generator(f, m, d) for f in ("left", "right") for m in (1, 2) for d in (True, False)),
        key=lambda g: g.index,
    )
)
_BY_NAME = {g.name: g for g in GENERATORS}
_SLOT_SIGN = (1, 1, -1, -1)

# (lam power, exponents of the 8 generators in canonical order)
Key = tuple[int, tuple[int, ...]]
_UNIT_WORD = (0,) * 8


def generator(name: str) -> Generator:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown generator {name!r}; expected one of {sorted(_BY_NAME)}") from None


class OperatorPoly:
    """Immutable polynomial in canonical normal order.

    ``terms`` maps ``(lam_power, word)`` to a nonzero :class:`GaussianRational`,
    where ``word`` is the exponent vector of the generators in canonical order.
    Two polynomials are equal exactly when their term maps are equal.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Key, GaussianRational] | None = None):
        clean = {}
        for key, c in (terms or {}).items():
            c = GaussianRational.coerce(c)
            if c:
                lam_pow, word = key
                if lam_pow < 0 or len(word) != 8 or min(word) < 0:
                    raise ValueError(f"malformed term key {key!r}")
                clean[(int(lam_pow), tuple(int(e) for e in word))] = c
        self._terms = clean
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def scalar(cls, value, lam_power: int = 0) -> "OperatorPoly":
        return cls({(lam_power, _UNIT_WORD): GaussianRational.coerce(value)})

    @classmethod
    def from_generator(cls, g: Generator | str) -> "OperatorPoly":
        if isinstance(g, str):
            g = generator(g)
        word = [0] * 8
        word[g.index] = 1
        return cls({(0, tuple(word)): GaussianRational(Fraction(1))})

    @classmethod
    def coerce(cls, value) -> "OperatorPoly":
        if isinstance(value, OperatorPoly):
            return value
        if isinstance(value, Generator):
            return cls.from_generator(value)
        return cls.scalar(value)

    # inspection -----------------------------------------------------------
    @property
    def terms(self) -> dict[Key, GaussianRational]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Key, GaussianRational]]:
        return iter(sorted(self._terms.items(), key=lambda kv: _term_sort_key(kv[0])))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def degree(self) -> int:
        """Largest total ladder degree of any term (0 for scalars and zero)."""
        return max((sum(w) for _, w in self._terms), default=0)

    @property
    def max_denominator(self) -> int:
        return max((c.denominator for c in self._terms.values()), default=1)

    def coefficient(self, word: Iterable[int], lam_power: int = 0) -> GaussianRational:
        return self._terms.get((lam_power, tuple(word)), GaussianRational())

    # arithmetic -----------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorPoly):
            try:
                other = OperatorPoly.coerce(other)
            except TypeError:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other) -> "OperatorPoly":
        try:
            o = OperatorPoly.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for k, c in o._terms.items():
            out[k] = out[k] + c if k in out else c
        return OperatorPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "OperatorPoly":
        return OperatorPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "OperatorPoly":
        try:
            return self + (-OperatorPoly.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other) -> "OperatorPoly":
        return OperatorPoly.coerce(other) - self

    def __mul__(self, other) -> "OperatorPoly":
        try:
            o = OperatorPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return multiply(self, o)

    def __rmul__(self, other) -> "OperatorPoly":
        try:
            o = OperatorPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return multiply(o, self)

    def __truediv__(self, other) -> "OperatorPoly":
        d = GaussianRational.coerce(other)
        return OperatorPoly({k: c / d for k, c in self._terms.items()})

    def __pow__(self, n: int) -> "OperatorPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def dagger(self) -> "OperatorPoly":
        return adjoint(self)

    def __repr__(self) -> str:
        return f"OperatorPoly({self})"

    def __str__(self) -> str:
        return format_poly(self)


def _term_sort_key(key: Key):
    lam_pow, word = key
    return (sum(word), tuple(-e for e in word), lam_pow)


def _monomial_product(w1: tuple[int, ...], w2: tuple[int, ...]) -> list[tuple[int, tuple[int, ...]]]:
    """Normal-order ``w1 * w2`` slot by slot.

    Per slot, ``g^q (g+)^p = sum_k C(q,k) C(p,k) k! s^k (g+)^(p-k) g^(q-k)``
    with ``s = [g, g+]``; distinct slots commute, so the product factorizes.
    Returns ``(integer coefficient, word)`` pairs.
    """
    per_slot = []
    for slot in range(4):
        c1, a1 = w1[slot], w1[slot + 4]
        c2, a2 = w2[slot], w2[slot + 4]
        s = _SLOT_SIGN[slot]
        options = []
        for k in range(min(a1, c2) + 1):
            coef = comb(a1, k) * comb(c2, k) * factorial(k) * (s**k)
            options.append((coef, c1 + c2 - k, a1 + a2 - k))
        per_slot.append(options)
    out = [(1, [0] * 8)]
    for slot, options in enumerate(per_slot):
        nxt = []
        for coef, word in out:
            for c, cre, ann in options:
                w = list(word)
                w[slot], w[slot + 4] = cre, ann
                nxt.append((coef * c, w))
        out = nxt
    return [(c, tuple(w)) for c, w in out]


def multiply(p: OperatorPoly, q: OperatorPoly) -> OperatorPoly:
    """Canonical form of the product ``p q``."""
    acc: dict[Key, GaussianRational] = {}
    for (l1, w1), c1 in p._terms.items():
        for (l2, w2), c2 in q._terms.items():
            base = c1 * c2
            for n, w in _monomial_product(w1, w2):
                key = (l1 + l2, w)
                term = base * n
                acc[key] = acc[key] + term if key in acc else term
    return OperatorPoly(acc)


def commutator(p: OperatorPoly, q: OperatorPoly) -> OperatorPoly:
    p, q = OperatorPoly.coerce(p), OperatorPoly.coerce(q)
    return multiply(p, q) - multiply(q, p)


def adjoint(p: OperatorPoly) -> OperatorPoly:
    """Hermitian conjugate: conjugate coefficients, dagger and reverse each word.

    ``lam`` is real.  A canonical word ``C A`` (creators then annihilators)
    has adjoint ``A^+ C^+``, which is re-normal-ordered by multiplication.
    """
    p = OperatorPoly.coerce(p)
    out = ZERO
    for (lam_pow, word), c in p._terms.items():
        # adjoint of the annihilator block is a pure creator word and vice versa
        ann_dag = OperatorPoly({(0, tuple(word[4:]) + (0,) * 4): GaussianRational(Fraction(1))})
        cre_dag = OperatorPoly({(0, (0,) * 4 + tuple(word[:4])): GaussianRational(Fraction(1))})
        out = out + multiply(ann_dag, cre_dag) * OperatorPoly.scalar(c.conjugate(), lam_pow)
    return out


def format_poly(p: OperatorPoly) -> str:
    """Deterministic text form, terms in canonical order."""
    if p.is_zero():
        return "0"
    parts = []
    for (lam_pow, word), c in p.items():
        factors = []
        if lam_pow:
            factors.append("lam" if lam_pow == 1 else f"lam^{lam_pow}")
        for g, e in zip(GENERATORS, word):
            if e:
                factors.append(g.name if e == 1 else f"{g.name}^{e}")
        if not factors:
            parts.append(str(c))
        elif c == GaussianRational(Fraction(1)):
            parts.append("*".join(factors))
        elif c == GaussianRational(Fraction(-1)):
            parts.append("-" + "*".join(factors))
        else:
            parts.append(f"{c}*" + "*".join(factors))
    text = " + ".join(parts)
    return text.replace("+ -", "- ")


ZERO = OperatorPoly()
ONE = OperatorPoly.scalar(1)
I = OperatorPoly.scalar(GaussianRational(Fraction(0), Fraction(1)))
LAM = OperatorPoly.scalar(1, lam_power=1)
