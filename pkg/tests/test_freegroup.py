import itertools

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from malcev.freegroup import (
    Derivation,
    MagnusCapExceeded,
    Order,
    ResourceCapExceeded,
    Word,
    compare,
    cyclic_reduction,
    format_word,
    magnus_expand,
    normal_closure_ball,
    power_exponent,
    primitive_root,
    sign,
    sort_words,
    words_up_to,
)

W = Word.parse
T = sympy.symbols("t1 t2", commutative=False)


def _sympy_expand(w: Word, deg: int):
    """Independent Magnus expansion with sympy noncommutative symbols."""
    out = sympy.Integer(1)
    for a in w.letters:
        t = T[abs(a) - 1]
        f = 1 + t if a > 0 else sum((-t) ** j for j in range(deg + 1))
        out = sympy.expand(out * f)
        out = sum(
            (term for term in sympy.Add.make_args(out) if _deg(term) <= deg), sympy.Integer(0)
        )
    return out


def _deg(term):
    return sum(e for b, e in (p.as_base_exp() for p in sympy.Mul.make_args(term)) if b in T)


def _monomial(term):
    idx = []
    coeff = 1
    for p in sympy.Mul.make_args(term):
        b, e = p.as_base_exp()
        if b in T:
            idx.extend([T.index(b) + 1] * int(e))
        else:
            coeff *= p
    return tuple(idx), int(coeff)


def _oracle_sign(w: Word, deg: int = 6) -> int:
    terms = [_monomial(t) for t in sympy.Add.make_args(_sympy_expand(w, deg) - 1)]
    terms = [(m, c) for m, c in terms if c]
    if not terms:
        return 0
    m, c = min(terms, key=lambda mc: (len(mc[0]), mc[0]))
    return 1 if c > 0 else -1


def test_reduction_and_arithmetic():
    assert W("xX") == Word()
    assert W("xyYz") == W("xz")
    assert W("xy") * W("YX") == Word()
    assert W("xy").inverse() == W("YX")
    assert W("x^3") == W("xxx")
    assert W("(xy)^-2") == W("YXYX")
    assert W("x").conjugate_by(W("y")) == W("yxY")
    assert format_word(Word()) == "1"
    assert str(W("xY")) == "xY"


def test_generator_convention():
    assert compare(W("y"), W("x")) is Order.LT
    assert compare(Word(), W("x")) is Order.LT
    assert compare(W("X"), Word()) is Order.LT
    assert compare(Word(), W("XYxy")) is Order.LT
    assert W("y") < W("x") and W("x") > Word()


def test_magnus_expansion_by_hand():
    # x^-1 y^-1 x y = 1 + t1 t2 - t2 t1 + (degree >= 3)
    p = magnus_expand(W("XYxy"), 2)
    assert p.terms == {(): 1, (1, 2): 1, (2, 1): -1}
    assert magnus_expand(W("X"), 2).terms == {(): 1, (1,): -1, (1, 1): 1}


@pytest.mark.parametrize("w", [w for w in words_up_to(4) if w])
def test_magnus_matches_sympy_oracle(w):
    ours = magnus_expand(w, 4).terms
    theirs = dict(
        mc for mc in (_monomial(t) for t in sympy.Add.make_args(_sympy_expand(w, 4))) if mc[1]
    )
    assert ours == theirs


def test_sign_matches_oracle_on_commutators():
    words = [W("XYxy"), W("YXyx"), W("xyXY"), W("XYxyXYxy"), W("xXYxy")]
    for w in words:
        assert sign(w) == _oracle_sign(w)


def test_sign_cap():
    # [[x, y], x] has zero expansion below degree 3
    c = W("XYxy")
    w = c.inverse() * W("X") * c * W("x")
    assert magnus_expand(w, 2).leading() is None
    assert sign(w) == _oracle_sign(w, 3)
    with pytest.raises(MagnusCapExceeded):
        sign(w, cap=2)


def test_sort_words():
    ws = [W("x"), Word(), W("y"), W("X"), W("Y")]
    assert sort_words(ws) == [W("X"), W("Y"), Word(), W("y"), W("x")]


word_st = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6).map(Word)


@settings(max_examples=200, deadline=None)
@given(word_st, word_st, word_st)
def test_order_properties(u, w, c):
    r = compare(u, w)
    assert r == -compare(w, u)
    assert (r is Order.EQ) == (u == w)
    assert compare(c * u, c * w) == r
    assert compare(u * c, w * c) == r


def test_primitive_root_and_powers():
    assert primitive_root(W("yxxY")) == (W("yxY"), 2)
    assert primitive_root(W("xyxy")) == (W("xy"), 2)
    with pytest.raises(ValueError):
        primitive_root(Word())
    assert power_exponent(W("XXX"), W("x")) == -3
    assert power_exponent(Word(), W("x")) == 0
    assert power_exponent(W("xy"), W("x")) is None
    assert power_exponent(W("xyxy"), W("xy")) == 2
    assert cyclic_reduction(W("yxY")) == (W("y"), W("x"))


def test_words_up_to_counts():
    assert [len([w for w in words_up_to(3) if len(w) == n]) for n in range(4)] == [1, 4, 12, 36]
    assert len(words_up_to(2, 3)) == 1 + 6 + 30


def test_normal_closure_ball_depth_one():
    g = W("x")
    ball = normal_closure_ball(g, 1, 3)
    # <x>_1 = kernel of the exponent sum in y
    expected = {w for w in words_up_to(3) if w.exponent_sums(2)[1] == 0}
    assert ball.members == expected
    for w in ball.members:
        assert ball.derivation(w).value() == w


def test_normal_closure_derivations_replay():
    g = W("x")
    for depth in (2, 3):
        ball = normal_closure_ball(g, depth, 4)
        assert W("x") in ball and W("y") not in ball
        for w, d in ball.derivations.items():
            assert d.value() == w
            assert d.depth == depth


def test_derivation_algebra():
    g = W("x")
    c = Derivation(g, 0, word=W("y"))
    d = Derivation(g, 1, factors=((Derivation(g, 0, word=Word()), 1),))
    assert d.value() == W("x")
    assert d.conjugate_by(c).value() == W("yxY")
    assert (d * d).value() == W("xx")
    with pytest.raises(ValueError):
        d.conjugate_by(d)


def test_ball_budget():
    with pytest.raises(ResourceCapExceeded):
        normal_closure_ball(W("x"), 1, 6, budget=50)


def test_identity_g_rejected():
    with pytest.raises(ValueError):
        normal_closure_ball(Word(), 1, 2)


def test_exhaustive_total_order_small():
    ws = words_up_to(2)
    for a, b, c in itertools.product(ws, repeat=3):
        if a < b and b < c:
            assert a < c
