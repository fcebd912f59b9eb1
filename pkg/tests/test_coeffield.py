from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from malcev.coeffield import (
    Field,
    FieldAut,
    FieldMismatch,
    Quad,
    TwistSpec,
    coeff_from_json,
    coeff_to_json,
    field_arith,
    format_coeff,
    twist_of_word,
)
from malcev.freegroup import Word

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=7)


def _mat(q: Quad):
    """Regular representation of a + b sqrt d on the basis (1, sqrt d)."""
    a = sympy.Rational(q.a.numerator, q.a.denominator)
    b = sympy.Rational(q.b.numerator, q.b.denominator)
    return sympy.Matrix([[a, q.d * b], [b, a]])


@settings(max_examples=100, deadline=None)
@given(fracs, fracs, fracs, fracs, st.sampled_from([2, 3, -1, 5, -7]))
def test_quad_arithmetic_matches_matrix_oracle(a, b, c, e, d):
    x, y = Quad(a, b, d), Quad(c, e, d)
    assert _mat(x + y) == _mat(x) + _mat(y)
    assert _mat(x * y) == _mat(x) * _mat(y)
    if y:
        assert _mat(field_arith("div", x, y)) == _mat(x) * _mat(y).inv()
        assert y * y.inverse() == 1
        assert y.norm() == _mat(y).det()


def test_field_construction():
    with pytest.raises(ValueError):
        Field(4)
    with pytest.raises(ValueError):
        Field(1)
    assert Field(-1).name == "Q(sqrt -1)"
    assert Field()(3) == Fraction(3)
    with pytest.raises(FieldMismatch):
        Field()(1, 1)
    with pytest.raises(FieldMismatch):
        Quad(1, 1, 2) + Quad(1, 1, 3)


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        field_arith("inv", Fraction(0))
    with pytest.raises(ZeroDivisionError):
        field_arith("inv", Quad(0, 0, 2))


def test_automorphisms():
    f = Field(2)
    r = f.sqrt_d()
    assert FieldAut.CONJUGATION(1 + r) == 1 - r
    assert FieldAut.CONJUGATION.compose(FieldAut.CONJUGATION) is FieldAut.IDENTITY
    assert FieldAut.CONJUGATION.inverse() is FieldAut.CONJUGATION
    assert Field().automorphisms() == (FieldAut.IDENTITY,)


def test_twist_is_a_morphism():
    tw = TwistSpec.from_names(["conj", "id"])
    assert twist_of_word(tw, Word.parse("x")) is FieldAut.CONJUGATION
    assert twist_of_word(tw, Word.parse("xx")) is FieldAut.IDENTITY
    assert twist_of_word(tw, Word.parse("yXy")) is FieldAut.CONJUGATION
    assert tw.names() == ["conj", "id"]
    assert TwistSpec.trivial(3).is_trivial


def test_format_and_parse_round_trip():
    f = Field(3)
    for c in [f(Fraction(3, 4)), f(0, -1), f(1, 2), f(Fraction(1, 2), Fraction(-3, 5)), f(-2)]:
        assert f.parse(format_coeff(c)) == c
        assert coeff_from_json(coeff_to_json(c), f) == c
    assert format_coeff(Fraction(-3, 4)) == "-3/4"
    assert format_coeff(f(0, -1)) == "-r"
    assert format_coeff(f(1, 2)) == "1+2r"
