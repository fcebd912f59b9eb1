from fractions import Fraction

import pytest

from malcev.expr import (
    BigO,
    Coefficient,
    Conjugation,
    Inverse,
    Neg,
    ParseError,
    Power,
    Product,
    Sum,
    WordAtom,
    parse,
    parse_word,
)
from malcev.freegroup import Word


def test_spec_examples():
    assert parse("x*y^-1") == Product((WordAtom(Word((1,))), Inverse(WordAtom(Word((2,))))))
    assert parse("(1 - x)^-1") == Inverse(
        Sum((Coefficient(Fraction(1)), Neg(WordAtom(Word((1,))))))
    )
    with pytest.raises(ParseError) as exc:
        parse("x**")
    assert exc.value.offset == 2
    assert "WORD" in exc.value.expected


def test_power_binds_to_last_letter():
    assert parse_word("xy^-1") == Word((1, -2))
    assert parse_word("(xy)^-1") == Word((-2, -1))
    assert parse_word("x^2y") == Word((1, 1, 2))


def test_precedence():
    node = parse("1 + 2x*y")
    assert isinstance(node, Sum)
    assert isinstance(node.terms[1], Product)
    assert parse("x^-2") == Inverse(Power(WordAtom(Word((1,))), 2))


def test_conj_and_big_o():
    assert isinstance(parse("conj(1+y; x)"), Conjugation)
    assert parse("O(> xy)") == BigO(Word((1, 2)))
    assert parse("O(> 1)") == BigO(Word())


def test_indexed_generators_and_rank():
    assert parse_word("x1x2X3", rank=3) == Word((1, 2, -3))
    with pytest.raises(ParseError):
        parse("z", rank=2)
    with pytest.raises(ParseError):
        parse("x3", rank=2)


@pytest.mark.parametrize("bad", ["", "(x", "x +", "1/0", "conj(x)", "O(x)", "x ^ y", "3 $"])
def test_errors_carry_offsets(bad):
    with pytest.raises(ParseError) as exc:
        parse(bad)
    assert 0 <= exc.value.offset <= len(bad)


def test_not_a_word():
    with pytest.raises(ParseError):
        parse_word("x + y")
