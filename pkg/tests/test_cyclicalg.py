import random
from fractions import Fraction

import pytest
import sympy

from malcev import cyclicalg as ca
from malcev import linalg

t = sympy.Symbol("t")


@pytest.fixture(scope="module")
def quat():
    return ca.preset("quaternion")


@pytest.fixture(scope="module")
def lam():
    return ca.preset("lam-14-16")


def _sym_poly(p):
    return sum(sympy.Rational(c.numerator, c.denominator) * t**i for i, c in enumerate(p))


def _rand_elem(alg, rng, h=3):
    return alg.element([rng.randint(-h, h) for _ in range(alg.dim)])


def test_presets(quat, lam):
    assert quat.dim == 4 and lam.dim == 9
    assert quat.u * quat.v == -(quat.v * quat.u)
    assert quat.v.inverse() == -quat.v
    assert lam.u ** 3 == lam.scalar(2)
    assert lam.u * lam.v * lam.u.inverse() == lam.v ** 2 - 2


def test_construction_errors():
    with pytest.raises(ValueError, match="not a root"):
        ca.build_algebra([1, -3, 0, 1], [-1, 0, 1], 2)  # v^2 - 1
    with pytest.raises(ValueError, match="reducible"):
        ca.build_algebra([-1, 0, 1], [0, -1], 1)
    with pytest.raises(ValueError, match="nonzero"):
        ca.build_algebra([1, 0, 1], [0, -1], 0)
    with pytest.raises(ValueError, match="order"):
        ca.build_algebra([1, 0, 1], [0, 1], -1)
    with pytest.raises(ValueError):
        ca.preset("octonion")


def test_irreducibility_oracle():
    cases = [[1, -3, 0, 1], [-2, 0, 0, 1], [1, 0, 1], [-1, 0, 1], [2, 0, 0, 0, 1], [-4, 0, 0, 0, 1]]
    for f in cases:
        fr = [Fraction(c) for c in f]
        assert ca.is_irreducible(fr) == sympy.Poly(_sym_poly(fr), t).is_irreducible


def test_zero_divisor_for_split_algebra():
    alg = ca.build_algebra([1, 0, 1], [0, -1], 1)
    u = alg.u
    assert (u - 1) * (u + 1) == alg.zero
    x, y = ca.zero_divisor_witness(alg)
    assert x and y and x * y == alg.zero


def test_no_small_zero_divisor_in_division_presets(quat):
    assert ca.zero_divisor_witness(quat) is None


@pytest.mark.parametrize("name", sorted(ca.PRESETS))
def test_regular_representation_is_multiplicative(name):
    alg = ca.preset(name)
    rng = random.Random(1)
    for _ in range(200):
        x, y = _rand_elem(alg, rng), _rand_elem(alg, rng)
        assert (x * y).regmat() == linalg.matmul(x.regmat(), y.regmat())


@pytest.mark.parametrize("name", sorted(ca.PRESETS))
def test_defining_relations_and_associativity(name):
    alg = ca.preset(name)
    u = alg.u
    assert u ** alg.n == alg.scalar(alg.a)
    for i in range(alg.n):
        k = alg.basis_element(i, 0)
        assert u * k * u.inverse() == alg.from_k(alg.sigma_power_poly(1, [0] * i + [1]))
    rng = random.Random(2)
    for _ in range(30):
        a, b, c = (_rand_elem(alg, rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)


def test_inverse_examples(quat, lam):
    z = quat.parse("1 + v + u")
    assert z * z.inverse() == quat.one
    rng = random.Random(3)
    for _ in range(20):
        x = _rand_elem(lam, rng)
        if x:
            assert x * x.inverse() == lam.one == x.inverse() * x
    split = ca.build_algebra([1, 0, 1], [0, -1], 1)
    with pytest.raises(ca.NotInvertible):
        (split.u - 1).inverse()


def test_centralizer(quat, lam):
    assert ca.centralizer(quat, quat.basis())[0] == 1
    dim, basis = ca.centralizer(quat, [quat.v])
    assert dim == 2 and ca.span_equal(basis, [quat.one, quat.v])
    assert ca.centralizer(lam, [])[0] == 9
    assert ca.centralizer(lam, lam.basis())[0] == 1


def test_double_centralizer(lam):
    for gen in (lam.v, lam.u, lam.v + lam.u):
        _, c1 = ca.centralizer(lam, [gen])
        _, c2 = ca.centralizer(lam, c1)
        assert ca.span_equal(c1, c2)


def test_is_maximal_subfield(quat, lam):
    assert ca.is_maximal_subfield([quat.one, quat.v])
    assert not ca.is_maximal_subfield([quat.one])
    w = ca.Subfield(lam.u)
    assert ca.is_maximal_subfield(w.basis)
    with pytest.raises(ValueError):
        ca.is_maximal_subfield([quat.one, quat.v, quat.u])


def test_min_poly_against_sympy(lam):
    rng = random.Random(4)
    for _ in range(10):
        x = _rand_elem(lam, rng, 2)
        p = x.min_poly()
        # p(x) = 0 and p is irreducible (F(x) is a field inside a division algebra)
        val = ca.Subfield(x).element(p)
        assert not val
        assert sympy.Poly(_sym_poly(p), t).is_irreducible


def test_galois_roots(quat, lam):
    assert ca.galois_roots(ca.Subfield(quat.v)) == [[0, 1], [0, -1]]
    assert ca.galois_roots(ca.Subfield(lam.u)) == [[0, 1]]
    roots = ca.galois_roots(ca.Subfield(lam.v))
    assert sorted(map(tuple, roots)) == sorted([(0, 1), (-2, 0, 1), (2, -1, -1)])
    f = _sym_poly(lam.f)
    for q in roots:
        assert sympy.rem(f.subs(t, _sym_poly(q)), f, t) == 0


def test_galois_roots_escalation():
    # e = 3 + 20v has conjugate root 6 - e, beyond height 1 and 2
    alg = ca.preset("quaternion")
    K = ca.Subfield(alg.v * 20 + 3)
    roots = ca.galois_roots(K, height=1, cap=64)
    assert sorted(map(tuple, roots)) == [(0, 1), (6, -1)]
    with pytest.raises(ca.GaloisSearchExhausted):
        ca.galois_roots(K, height=1, cap=2)


def test_expected_root_count():
    F = Fraction
    assert ca.expected_root_count([F(1), F(-3), F(0), F(1)]) == 3
    assert ca.expected_root_count([F(-2), F(0), F(0), F(1)]) == 1
    assert ca.expected_root_count([F(1), F(0), F(1)]) == 2
    assert ca.expected_root_count([F(2), F(0), F(0), F(0), F(1)]) is None


def test_self_invariance_reports(quat, lam):
    r = ca.self_invariance_report(ca.Subfield(quat.v))
    assert r.is_maximal and not r.self_invariant
    assert r.normalizer_witnesses[0][1] == quat.u
    r = ca.self_invariance_report(ca.Subfield(lam.u))
    assert r.is_maximal and r.self_invariant and r.galois_roots_found == [[0, 1]]
    r = ca.self_invariance_report(ca.Subfield(lam.v))
    assert not r.self_invariant
    assert r.normalizer_witnesses[0] == ([-2, 0, 1], lam.u)
    assert r.centralizer_dim == 3 and r.deg_F ** 2 == lam.dim


def test_every_root_realized_by_conjugation(lam, quat):
    for alg in (lam, quat):
        for gen in (alg.v, alg.u, alg.v + alg.u):
            r = ca.self_invariance_report(ca.Subfield(gen))
            if r.is_maximal:
                assert all(x is not None for _, x in r.normalizer_witnesses)
                for q, x in r.normalizer_witnesses:
                    K = ca.Subfield(gen)
                    assert x * gen * x.inverse() == K.element(q)


def test_span_closure(quat, lam):
    sc = ca.span_closure(ca.Subfield(quat.v).basis, quat.u)
    assert (sc.dim_K, sc.dim_F, sc.closed, sc.division_check) == (2, 4, True, True)
    sc = ca.span_closure(ca.Subfield(lam.v).basis, lam.v ** 2)
    assert sc.dim_K == 1 and sc.dim_F == 3
    sc = ca.span_closure(ca.Subfield(lam.v).basis, lam.u)
    assert sc.dim_F == 9
    with pytest.raises(ca.NormalizationError):
        ca.span_closure(ca.Subfield(quat.v).basis, quat.one + quat.u)


def test_primitive_element(quat, lam):
    v = quat.v
    assert ca.primitive_element(v, -v).c == v
    pe = ca.primitive_element(v, 1 + v)
    assert pe.c.degree() == 2 == pe.dim
    assert ca.primitive_element(quat.scalar(3), v).c == v
    with pytest.raises(ValueError):
        ca.primitive_element(quat.v, quat.u)
    pe = ca.primitive_element(lam.v, lam.v ** 2)
    assert pe.c.degree() == pe.dim == 3


def test_autocommutator_probe(quat, lam):
    K = ca.Subfield(quat.v)
    x = ca.autocommutator_probe(K, [0, -1])
    assert x == quat.one + quat.v
    assert x.inverse() * (quat.one - quat.v) == -quat.v
    with pytest.raises(ValueError):
        ca.autocommutator_probe(K, [0, 1])
    KL = ca.Subfield(lam.v)
    x = ca.autocommutator_probe(KL, [-2, 0, 1])
    assert not isinstance(x, str)
    # u realizes tau by conjugation, which gives tau(x) independently of the probe
    tau_x = lam.u * x * lam.u.inverse()
    assert not (x.inverse() * tau_x).is_scalar


def test_conjugation_preserves_self_invariance(lam):
    rng = random.Random(6)
    for gen in (lam.v, lam.u):
        base = ca.self_invariance_report(ca.Subfield(gen)).self_invariant
        for _ in range(3):
            x = _rand_elem(lam, rng, 2)
            if not x:
                continue
            K2 = ca.Subfield(gen).conjugate_by(x)
            assert ca.self_invariance_report(K2).self_invariant == base


def test_parse_and_print(quat, lam):
    z = lam.parse("2v^2u - 1/2 + u^2")
    assert str(z) == "-1/2 + 2*v^2*u + u^2"
    assert lam.parse(str(z)) == z
    assert quat.parse("conj(u; v)") == -quat.v
    assert quat.parse("U") == quat.u.inverse()
    with pytest.raises(ValueError):
        quat.parse("r")
