"""Exact coefficient fields Q and Q(sqrt d), their automorphisms, and twists.

Rational coefficients are plain :class:`fractions.Fraction` values.  Elements
of Q(sqrt d) are :class:`Quad` values; a session fixes one ``d`` and mixing
two different quadratic fields raises :class:`FieldMismatch`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .freegroup import Word


class FieldMismatch(TypeError):
    pass


def _squarefree(d: int) -> bool:
    if d in (0, 1):
        return False
    n = abs(d)
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


class Quad:
    """``a + b*sqrt(d)`` with rational ``a``, ``b``."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    def _coerce(self, other) -> Quad | None:
        if isinstance(other, Quad):
            if other.d != self.d:
                raise FieldMismatch(f"Q(sqrt {self.d}) vs Q(sqrt {other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return Quad(other, 0, self.d)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self) -> Quad:
        return Quad(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(
            self.a * o.a + self.d * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.d,
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> Quad:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt d)")
        return Quad(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def conjugate(self) -> Quad:
        return Quad(self.a, -self.b, self.d)

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __eq__(self, other) -> bool:
        if isinstance(other, Quad):
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __repr__(self) -> str:
        return f"Quad({self.a}, {self.b}, d={self.d})"

    def __str__(self) -> str:
        return format_coeff(self)


Coeff = Union[Fraction, Quad]


class FieldAut(enum.Enum):
    IDENTITY = "id"
    CONJUGATION = "conj"

    def __call__(self, c: Coeff) -> Coeff:
        if self is FieldAut.CONJUGATION and isinstance(c, Quad):
            return c.conjugate()
        return c

    def compose(self, other: FieldAut) -> FieldAut:
        """``self o other`` (apply ``other`` first)."""
        return FieldAut.IDENTITY if self is other else FieldAut.CONJUGATION

    def inverse(self) -> FieldAut:
        return self


class Field:
    """Q (``d is None``) or Q(sqrt d)."""

    def __init__(self, d: int | None = None):
        if d is not None and not _squarefree(d):
            raise ValueError(f"d={d} must be a square-free integer other than 0, 1")
        self.d = d

    @property
    def is_rational(self) -> bool:
        return self.d is None

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and self.d == other.d

    def __hash__(self) -> int:
        return hash(("Field", self.d))

    def __repr__(self) -> str:
        return "Field(Q)" if self.d is None else f"Field(Q(sqrt {self.d}))"

    @property
    def name(self) -> str:
        return "Q" if self.d is None else f"Q(sqrt {self.d})"

    def __call__(self, a=0, b=0) -> Coeff:
        if self.d is None:
            if b:
                raise FieldMismatch("Q has no sqrt d part")
            if isinstance(a, Quad):
                if a.b:
                    raise FieldMismatch("irrational value in a Q session")
                return a.a
            return Fraction(a)
        if isinstance(a, Quad):
            if a.d != self.d:
                raise FieldMismatch(f"Q(sqrt {a.d}) value in {self.name} session")
            return Quad(a.a, a.b + Fraction(b), self.d)
        return Quad(a, b, self.d)

    @property
    def zero(self) -> Coeff:
        return self(0)

    @property
    def one(self) -> Coeff:
        return self(1)

    def sqrt_d(self) -> Quad:
        if self.d is None:
            raise FieldMismatch("Q has no sqrt d")
        return Quad(0, 1, self.d)

    def automorphisms(self) -> tuple[FieldAut, ...]:
        if self.d is None:
            return (FieldAut.IDENTITY,)
        return (FieldAut.IDENTITY, FieldAut.CONJUGATION)

    def fixes(self, aut: FieldAut, c: Coeff) -> bool:
        return aut(c) == c

    def parse(self, text: str) -> Coeff:
        from .expr import parse_coefficient

        return parse_coefficient(text, self)


def field_arith(op: str, *operands: Coeff):
    """Dispatch ``add``, ``sub``, ``mul``, ``neg``, ``inv``, ``div`` or ``eq``."""
    if op == "add":
        x, y = operands
        return x + y
    if op == "sub":
        x, y = operands
        return x - y
    if op == "mul":
        x, y = operands
        return x * y
    if op == "neg":
        (x,) = operands
        return -x
    if op == "inv":
        (x,) = operands
        if not x:
            raise ZeroDivisionError("inverse of zero")
        return x.inverse() if isinstance(x, Quad) else 1 / Fraction(x)
    if op == "div":
        x, y = operands
        return field_arith("mul", x, field_arith("inv", y))
    if op == "eq":
        x, y = operands
        return x == y
    raise ValueError(f"unknown field operation {op!r}")


def inverse(c: Coeff) -> Coeff:
    return field_arith("inv", c)


@dataclass(frozen=True)
class TwistSpec:
    """Images of the generators under a morphism ``G -> Aut(field)``.

    Since G is free, any choice of images extends uniquely.
    """

    generator_images: tuple[FieldAut, ...]

    @classmethod
    def trivial(cls, rank: int) -> TwistSpec:
        return cls((FieldAut.IDENTITY,) * rank)

    @classmethod
    def from_names(cls, names: Sequence[str]) -> TwistSpec:
        return cls(tuple(FieldAut(n) for n in names))

    @property
    def rank(self) -> int:
        return len(self.generator_images)

    @property
    def is_trivial(self) -> bool:
        return all(a is FieldAut.IDENTITY for a in self.generator_images)

    def names(self) -> list[str]:
        return [a.value for a in self.generator_images]


def twist_of_word(sigma: TwistSpec, w: Word) -> FieldAut:
    out = FieldAut.IDENTITY
    for a in w.letters:
        img = sigma.generator_images[abs(a) - 1]
        out = out.compose(img if a > 0 else img.inverse())
    return out


# Text form ---------------------------------------------------------------

def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_coeff(c: Coeff) -> str:
    """``3/4``, ``-r``, ``1+2r``, ``1/2-3/5r`` (``r`` is sqrt d)."""
    if isinstance(c, Quad):
        if c.b == 0:
            return _fmt_fraction(c.a)
        if c.b == 1:
            bpart = "r"
        elif c.b == -1:
            bpart = "-r"
        else:
            bpart = _fmt_fraction(c.b) + "r"
        if c.a == 0:
            return bpart
        return _fmt_fraction(c.a) + ("" if bpart.startswith("-") else "+") + bpart
    return _fmt_fraction(Fraction(c))


def is_compound(c: Coeff) -> bool:
    """True when the text form needs parentheses inside a product."""
    return isinstance(c, Quad) and c.a != 0 and c.b != 0


def coeff_to_json(c: Coeff):
    if isinstance(c, Quad):
        return [_fmt_fraction(c.a), _fmt_fraction(c.b)]
    return _fmt_fraction(Fraction(c))


def coeff_from_json(data, field: Field) -> Coeff:
    if isinstance(data, list):
        return field(Fraction(data[0]), Fraction(data[1]))
    return field(Fraction(data))

