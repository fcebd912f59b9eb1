"""Exact cyclic algebras ``(K/Q, sigma, a)`` and their subfields.

The algebra has basis ``v^i u^j`` (``0 <= i, j < n``) where ``K = Q(v)`` is
given by a monic minimal polynomial ``f`` of degree ``n``, ``u^n = a`` and
``u k = sigma(k) u`` for ``k`` in ``K``.  Coordinates are indexed by
``i + n*j``.  Everything is exact over :class:`fractions.Fraction`.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg

Poly = list  # coefficients low -> high, Fractions


# Polynomials over Q -----------------------------------------------------------

def _trim(p: Sequence[Fraction]) -> Poly:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return _trim(out)


def poly_mod(p: Sequence[Fraction], f: Sequence[Fraction]) -> Poly:
    """Remainder of ``p`` modulo the monic ``f``."""
    r = _trim(p)
    n = len(f) - 1
    while len(r) - 1 >= n:
        c = r[-1]
        shift = len(r) - 1 - n
        for i, fc in enumerate(f):
            r[shift + i] -= c * fc
        r = _trim(r)
    return r


def poly_compose(p: Sequence[Fraction], q: Sequence[Fraction], f: Sequence[Fraction]) -> Poly:
    """``p(q(t)) mod f`` by Horner's rule."""
    out: Poly = []
    for c in reversed(_trim(p)):
        out = poly_mod(poly_mul(out, q), f) or [Fraction(0)]
        out = _trim([out[0] + c] + out[1:])
    return out


def poly_str(p: Sequence[Fraction], var: str = "t") -> str:
    p = _trim(p)
    if not p:
        return "0"
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{_frac(mag)}*{mono}"
        else:
            body = _frac(mag)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _rational_roots(f: Sequence[Fraction]) -> list[Fraction]:
    """Rational roots of a polynomial with rational coefficients."""
    f = _trim(f)
    den = 1
    for c in f:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in f]
    while ints and ints[0] == 0:
        ints = ints[1:]
    if len(ints) <= 1:
        return [Fraction(0)] if len(f) > 1 and f[0] == 0 else []
    roots = set()
    if f[0] == 0:
        roots.add(Fraction(0))
    lead, const = abs(ints[-1]), abs(ints[0])
    for p in _divisors(const):
        for q in _divisors(lead):
            for s in (1, -1):
                r = Fraction(s * p, q)
                if sum(c * r**i for i, c in enumerate(ints)) == 0:
                    roots.add(r)
    return sorted(roots)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def is_irreducible(f: Sequence[Fraction]) -> bool:
    """Irreducibility over Q.

    Degrees <= 3 reduce to the rational root test; larger degrees are
    handed to sympy's factorization.
    """
    f = _trim(f)
    n = len(f) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    if n <= 3:
        return not _rational_roots(f)
    import sympy

    t = sympy.Symbol("t")
    return sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in f])), t).is_irreducible


# Algebra -----------------------------------------------------------------------

class NotInvertible(ArithmeticError):
    def __init__(self, element):
        self.element = element
        super().__init__(f"{element} is not invertible")


class NormalizationError(ValueError):
    """``x K x^-1`` is not contained in ``K``; ``witness`` is a basis element of K."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"x k x^-1 leaves K for k = {witness}")


class GaloisSearchExhausted(RuntimeError):
    pass


class CyclicAlgebra:
    def __init__(
        self,
        minpoly: Sequence,
        sigma_image: Sequence,
        a,
        name: str | None = None,
        division: bool = False,
    ):
        f = _trim(minpoly)
        if len(f) < 2 or f[-1] != 1:
            raise ValueError("minpoly must be monic of degree >= 1")
        if any(c.denominator != 1 for c in f):
            raise ValueError("minpoly must have integer coefficients")
        a = Fraction(a)
        if a == 0:
            raise ValueError("a must be nonzero")
        if not is_irreducible(f):
            raise ValueError(f"{poly_str(f, 'v')} is reducible over Q")
        n = len(f) - 1
        s = poly_mod(sigma_image, f)
        if poly_compose(f, s, f):
            raise ValueError(f"sigma(v) = {poly_str(s, 'v')} is not a root of {poly_str(f, 'v')}")
        powers = [[Fraction(0), Fraction(1)] if n > 1 else poly_mod([0, 1], f)]
        for _ in range(n - 1):
            powers.append(poly_compose(powers[-1], s, f))
        v = poly_mod([0, 1], f)
        if poly_compose(powers[-1], s, f) != v:
            raise ValueError("sigma iterated n times is not the identity on K")
        if any(p == v for p in powers[1:]):
            raise ValueError("sigma must have order exactly n")
        self.f = f
        self.sigma_image = s
        self.a = a
        self.n = n
        self.dim = n * n
        self.name = name
        self.division = division
        self._sigma_powers = [v] + powers[1:]  # sigma^j(v) for j < n
        self._table = self._build_table()

    def __repr__(self) -> str:
        label = self.name or f"({poly_str(self.f, 'v')}, {poly_str(self.sigma_image, 'v')}, {self.a})"
        return f"CyclicAlgebra({label})"

    def sigma_power_poly(self, j: int, p: Sequence[Fraction]) -> Poly:
        """``sigma^j`` applied to ``p(v)``, as a polynomial in ``v``."""
        return poly_compose(p, self._sigma_powers[j % self.n], self.f)

    def _build_table(self):
        n = self.n
        table = {}
        for i, j, k, l in itertools.product(range(n), repeat=4):
            # v^i u^j v^k u^l = v^i sigma^j(v^k) u^(j+l)
            vk = [Fraction(0)] * k + [Fraction(1)]
            q = poly_mod(poly_mul([Fraction(0)] * i + [Fraction(1)], self.sigma_power_poly(j, vk)), self.f)
            e = j + l
            scale = Fraction(1)
            if e >= n:
                e -= n
                scale = self.a
            table[(i + n * j, k + n * l)] = [
                (m + n * e, c * scale) for m, c in enumerate(q) if c
            ]
        return table

    # elements
    def element(self, coords: Sequence) -> AlgebraElement:
        if len(coords) != self.dim:
            raise ValueError(f"need {self.dim} coordinates")
        return AlgebraElement(self, tuple(Fraction(c) for c in coords))

    def basis_element(self, i: int, j: int = 0) -> AlgebraElement:
        c = [0] * self.dim
        c[i + self.n * j] = 1
        return self.element(c)

    def scalar(self, c) -> AlgebraElement:
        coords = [0] * self.dim
        coords[0] = c
        return self.element(coords)

    @property
    def one(self) -> AlgebraElement:
        return self.scalar(1)

    @property
    def zero(self) -> AlgebraElement:
        return self.scalar(0)

    @property
    def v(self) -> AlgebraElement:
        return self.basis_element(1 % self.n, 0) if self.n > 1 else self.scalar(-self.f[0])

    @property
    def u(self) -> AlgebraElement:
        return self.basis_element(0, 1 % self.n) if self.n > 1 else self.scalar(self.a)

    def basis(self) -> list[AlgebraElement]:
        return [self.basis_element(k % self.n, k // self.n) for k in range(self.dim)]

    def from_k(self, p: Sequence) -> AlgebraElement:
        """The element ``p(v)`` of ``K``."""
        p = poly_mod(p, self.f)
        return self.element([p[i] if i < len(p) else 0 for i in range(self.n)] + [0] * (self.dim - self.n))

    def parse(self, text: str) -> AlgebraElement:
        from .expr import evaluate, parse

        return evaluate(parse(text, alphabet="vu"), self)

    # hooks for expr.evaluate
    def expr_scalar(self, a, b) -> AlgebraElement:
        if b:
            raise ValueError("sqrt d is not available in a cyclic algebra")
        return self.scalar(a)

    def expr_word(self, w) -> AlgebraElement:
        out = self.one
        for letter in w.letters:
            g = self.v if abs(letter) == 1 else self.u
            out = out * (g if letter > 0 else g.inverse())
        return out

    def expr_inverse(self, x: AlgebraElement, depth=None) -> AlgebraElement:
        return x.inverse()

    def expr_conj(self, g: AlgebraElement, x: AlgebraElement, depth=None) -> AlgebraElement:
        return g * x * g.inverse()

    def expr_big_o(self, w):
        raise ValueError("O(> w) has no meaning in a cyclic algebra")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "minpoly": [_frac(c) for c in self.f],
            "sigma_image": [_frac(c) for c in self.sigma_image],
            "a": _frac(self.a),
            "n": self.n,
            "dim": self.dim,
            "division": self.division,
        }


PRESETS = {
    "lam-14-16": dict(minpoly=[1, -3, 0, 1], sigma_image=[-2, 0, 1], a=2, division=True),
    "quaternion": dict(minpoly=[1, 0, 1], sigma_image=[0, -1], a=-1, division=True),
}


def build_algebra(f: Sequence, sigma_image: Sequence, a, name: str | None = None, division: bool = False) -> CyclicAlgebra:
    return CyclicAlgebra(f, sigma_image, a, name=name, division=division)


def preset(name: str) -> CyclicAlgebra:
    try:
        spec = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return CyclicAlgebra(name=name, **spec)


class AlgebraElement:
    __slots__ = ("alg", "coords", "_regmat")

    def __init__(self, alg: CyclicAlgebra, coords: tuple[Fraction, ...]):
        self.alg = alg
        self.coords = coords
        self._regmat = None

    def _check(self, other) -> AlgebraElement:
        if isinstance(other, AlgebraElement):
            if other.alg is not self.alg:
                raise TypeError("elements of different algebras")
            return other
        return self.alg.scalar(other)

    def __add__(self, other) -> AlgebraElement:
        o = self._check(other)
        return AlgebraElement(self.alg, tuple(x + y for x, y in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement(self.alg, tuple(-x for x in self.coords))

    def __sub__(self, other) -> AlgebraElement:
        return self + (-self._check(other))

    def __rsub__(self, other) -> AlgebraElement:
        return self._check(other) - self

    def __mul__(self, other) -> AlgebraElement:
        o = self._check(other)
        out = [Fraction(0)] * self.alg.dim
        table = self.alg._table
        for p, x in enumerate(self.coords):
            if not x:
                continue
            for q, y in enumerate(o.coords):
                if not y:
                    continue
                xy = x * y
                for m, c in table[(p, q)]:
                    out[m] += xy * c
        return AlgebraElement(self.alg, tuple(out))

    def __rmul__(self, other) -> AlgebraElement:
        return self._check(other) * self

    def __pow__(self, k: int) -> AlgebraElement:
        if k < 0:
            return self.inverse() ** (-k)
        out = self.alg.one
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, AlgebraElement):
            return self.alg is other.alg and self.coords == other.coords
        if isinstance(other, (int, Fraction)):
            return self == self.alg.scalar(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coords)

    def __bool__(self) -> bool:
        return any(self.coords)

    @property
    def is_scalar(self) -> bool:
        return not any(self.coords[1:])

    def regmat(self) -> linalg.Matrix:
        """Left-multiplication matrix; column ``m`` is ``self * basis[m]``."""
        if self._regmat is None:
            self._regmat = self._mult_matrix(left=True)
        return self._regmat

    def right_regmat(self) -> linalg.Matrix:
        """Right-multiplication matrix; column ``m`` is ``basis[m] * self``."""
        return self._mult_matrix(left=False)

    def _mult_matrix(self, left: bool) -> linalg.Matrix:
        dim = self.alg.dim
        out = [[Fraction(0)] * dim for _ in range(dim)]
        for (p, q), entries in self.alg._table.items():
            x = self.coords[p] if left else self.coords[q]
            if not x:
                continue
            col = q if left else p
            for m, c in entries:
                out[m][col] += x * c
        return out

    def inverse(self) -> AlgebraElement:
        x = linalg.solve(self.regmat(), self.alg.one.coords)
        if x is None:
            raise NotInvertible(self)
        return AlgebraElement(self.alg, tuple(x))

    def is_invertible(self) -> bool:
        return linalg.det(self.regmat()) != 0

    def commutes_with(self, other: AlgebraElement) -> bool:
        return self * other == other * self

    def degree(self) -> int:
        """``deg_F``: rank of ``{1, e, e^2, ...}``."""
        return len(self.min_poly()) - 1

    def min_poly(self) -> Poly:
        powers = [self.alg.one.coords]
        e = self.alg.one
        while True:
            e = e * self
            basis = linalg.transpose(powers)
            sol = linalg.solve(basis, e.coords)
            if sol is not None:
                return [-c for c in sol] + [Fraction(1)]
            powers.append(e.coords)

    def __repr__(self) -> str:
        return f"AlgebraElement({format_element(self)!r})"

    def __str__(self) -> str:
        return format_element(self)


def format_element(x: AlgebraElement) -> str:
    n = x.alg.n
    parts = []
    for idx, c in enumerate(x.coords):
        if not c:
            continue
        i, j = idx % n, idx // n
        mono = []
        if i:
            mono.append("v" if i == 1 else f"v^{i}")
        if j:
            mono.append("u" if j == 1 else f"u^{j}")
        m = "*".join(mono)
        mag = abs(c)
        if m and mag == 1:
            body = m
        elif m:
            body = f"{_frac(mag)}*{m}"
        else:
            body = _frac(mag)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts) if parts else "0"


def algebra_arith(op: str, *operands):
    """Dispatch ``add``, ``sub``, ``mul``, ``neg``, ``inv`` or ``eq``."""
    if op == "add":
        return operands[0] + operands[1]
    if op == "sub":
        return operands[0] - operands[1]
    if op == "mul":
        return operands[0] * operands[1]
    if op == "neg":
        return -operands[0]
    if op == "inv":
        return operands[0].inverse()
    if op == "eq":
        return operands[0] == operands[1]
    raise ValueError(f"unknown algebra operation {op!r}")


def zero_divisor_witness(alg: CyclicAlgebra, height: int = 1, limit: int = 20000):
    """Search small elements for ``x y = 0`` with ``x, y != 0``.

    Evidence only: finding nothing proves nothing about division.
    """
    vals = range(-height, height + 1)
    for count, coords in enumerate(_ordered_coords(alg.dim, vals)):
        if count >= limit:
            break
        x = alg.element(coords)
        if not x or x.is_scalar:
            continue
        if linalg.det(x.regmat()):
            continue
        ns = linalg.nullspace(x.regmat())
        if ns:
            return x, alg.element(ns[0])
    return None


def _ordered_coords(dim: int, vals):
    # small L1 norm first, then low degree, then positive before negative
    rank_of = {v: (2 * v - 1 if v > 0 else -2 * v) for v in vals}
    cands = list(itertools.product(vals, repeat=dim))
    cands.sort(key=lambda c: (sum(abs(x) for x in c), [rank_of[x] for x in reversed(c)]))
    return cands


# Subalgebras and subfields -------------------------------------------------

def _coords(elems: Sequence[AlgebraElement]) -> list[tuple[Fraction, ...]]:
    return [e.coords for e in elems]


def span_equal(a: Sequence[AlgebraElement], b: Sequence[AlgebraElement]) -> bool:
    ra, rb = linalg.span_rank(_coords(a)), linalg.span_rank(_coords(b))
    return ra == rb == linalg.span_rank(_coords(a) + _coords(b))


def in_span(basis: Sequence[AlgebraElement], x: AlgebraElement) -> bool:
    return linalg.in_span(_coords(basis), x.coords)


def centralizer(alg: CyclicAlgebra, S: Sequence[AlgebraElement]) -> tuple[int, list[AlgebraElement]]:
    """``C_D(S)`` as the nullspace of the stacked maps ``X -> sX - Xs``."""
    rows: list[list[Fraction]] = []
    for s in S:
        left, right = s.regmat(), s.right_regmat()
        rows.extend([a - b for a, b in zip(lr, rr)] for lr, rr in zip(left, right))
    rows = [r for r in rows if any(r)]
    basis = [alg.element(v) for v in linalg.nullspace(rows, ncols=alg.dim)]
    return len(basis), basis


def is_maximal_subfield(K_basis: Sequence[AlgebraElement]) -> bool:
    """``C_D(K) == K``, cross-checked against ``dim_F(K)^2 == dim_F(D)``."""
    if not K_basis:
        raise ValueError("empty basis")
    alg = K_basis[0].alg
    for a, b in itertools.combinations(K_basis, 2):
        if not a.commutes_with(b):
            raise ValueError(f"span is not commutative: {a} and {b}")
    _, cent = centralizer(alg, K_basis)
    maximal = span_equal(cent, K_basis)
    dim_k = linalg.span_rank(_coords(K_basis))
    if alg.division and maximal != (dim_k * dim_k == alg.dim):
        raise AssertionError("centralizer test disagrees with the dimension count")
    return maximal


@dataclass
class Subfield:
    """``F(e)`` inside a cyclic algebra, with ``K = Q[t]/(p)``, ``p = minpoly(e)``."""

    generator: AlgebraElement

    def __post_init__(self):
        self.alg = self.generator.alg
        self.min_poly = self.generator.min_poly()
        self.degree = len(self.min_poly) - 1
        self.basis = [self.generator**i for i in range(self.degree)]

    def element(self, p: Sequence) -> AlgebraElement:
        """``p(e)`` in the algebra."""
        out = self.alg.zero
        power = self.alg.one
        for c in _trim(p):
            out = out + power * c
            power = power * self.generator
        return out

    def conjugate_by(self, x: AlgebraElement) -> Subfield:
        return Subfield(x * self.generator * x.inverse())

    def contains(self, y: AlgebraElement) -> bool:
        return in_span(self.basis, y)


def expected_root_count(p: Sequence[Fraction]) -> int | None:
    """Number of roots of the irreducible ``p`` inside ``Q[t]/(p)``.

    Exact for degree <= 3 (a quadratic field is normal; a cubic one is
    normal iff the discriminant is a square).  None when unknown.
    """
    m = len(p) - 1
    if m <= 2:
        return m
    if m == 3:
        c, b, a = p[0], p[1], p[2]
        disc = a * a * b * b - 4 * b**3 - 4 * a**3 * c - 27 * c * c + 18 * a * b * c
        return 3 if _is_rational_square(disc) else 1
    return None


def _is_rational_square(q: Fraction) -> bool:
    if q < 0:
        return False
    n, d = q.numerator, q.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


def _power_traces(p: Sequence[Fraction]) -> list[Fraction]:
    """``Tr(e^j)`` for ``j < deg p`` from the companion matrix of ``p``."""
    m = len(p) - 1
    comp = [[Fraction(0)] * m for _ in range(m)]
    for i in range(1, m):
        comp[i][i - 1] = Fraction(1)
    for i in range(m):
        comp[i][m - 1] = -p[i]
    out = []
    power = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    for _ in range(m):
        out.append(sum((power[i][i] for i in range(m)), Fraction(0)))
        power = linalg.matmul(power, comp)
    return out


def galois_roots(K: Subfield, height: int = 8, cap: int = 32) -> list[Poly]:
    """Roots of ``minpoly(e)`` inside ``K = F(e)``, as polynomials in ``e``.

    Candidates are integer polynomials of degree < deg K and bounded height,
    each checked exactly modulo the minimal polynomial.  The count must match
    :func:`expected_root_count` (or, when that is unknown, divide the degree);
    otherwise the height doubles, and running past ``cap`` raises.
    """
    p, m = K.min_poly, K.degree
    if m == 1:
        return [[Fraction(0)] if not p[0] else [-p[0]]]
    expected = expected_root_count(p)
    traces = _power_traces(p)
    h = height
    while True:
        found: list[Poly] = []
        seen = set()
        for coeffs in _ordered_coords(m, range(-h, h + 1)):
            # conjugate roots share the trace of e, a cheap linear filter
            if sum(c * t for c, t in zip(coeffs, traces)) != traces[1]:
                continue
            q = _trim(coeffs)
            key = tuple(q)
            if key in seen or len(q) < 2:
                continue
            seen.add(key)
            if not poly_compose(p, q, p):
                found.append(q)
                if len(found) == (expected or m):
                    break
        ok = len(found) == expected if expected is not None else m % len(found) == 0
        if ok:
            return sorted(found, key=lambda q: (q != [0, 1], len(q), [abs(c) for c in q]))
        if h >= cap:
            want = expected if expected is not None else "a divisor of the degree"
            raise GaloisSearchExhausted(
                f"{len(found)} roots found up to height {h}, expected {want}"
            )
        h = min(2 * h, cap)


@dataclass
class SubfieldReport:
    generator: AlgebraElement
    min_poly_over_F: Poly
    deg_F: int
    galois_roots_found: list[Poly]
    is_maximal: bool
    self_invariant: bool
    normalizer_witnesses: list[tuple[Poly, AlgebraElement | None]]
    degmax: int
    centralizer_dim: int

    def to_json(self) -> dict:
        return {
            "generator": str(self.generator),
            "min_poly": poly_str(self.min_poly_over_F),
            "deg_F": self.deg_F,
            "galois_roots": [poly_str(q, "e") for q in self.galois_roots_found],
            "galois_order": len(self.galois_roots_found),
            "is_maximal": self.is_maximal,
            "self_invariant": self.self_invariant,
            "normalizer_witnesses": [
                {"root": poly_str(q, "e"), "witness": None if x is None else str(x)}
                for q, x in self.normalizer_witnesses
            ],
            "degmax_lower_bound": self.degmax,
            "centralizer_dim": self.centralizer_dim,
        }


def _simplest(vectors: list[list[Fraction]]) -> list[Fraction]:
    return min(vectors, key=lambda v: (sum(1 for c in v if c), [c == 0 for c in v]))


def self_invariance_report(K: Subfield, height: int = 8, seed: int = 0) -> SubfieldReport:
    """Normalizer of ``K*`` through the systems ``x e = tau(e) x``.

    For each root ``tau`` of the minimal polynomial in ``K`` the solutions
    ``x`` of ``x e = tau(e) x`` are the elements acting on ``K`` as ``tau``.
    For the identity this is ``C_D(K)``, which must equal ``K`` when K is
    maximal.  K is self-invariant iff ``C_D(K) = K`` and every nontrivial
    ``tau`` has only the zero solution.
    """
    alg = K.alg
    roots = galois_roots(K, height)
    witnesses: list[tuple[Poly, AlgebraElement | None]] = []
    self_inv = True
    cent_dim = 0
    e = K.generator
    for q in roots:
        te = K.element(q)
        # X -> X e - tau(e) X
        m = [
            [a - b for a, b in zip(ra, rb)]
            for ra, rb in zip(e.right_regmat(), te.regmat())
        ]
        sols = linalg.nullspace([r for r in m if any(r)], ncols=alg.dim)
        if q == [0, 1]:
            cent_dim = len(sols)
            continue
        if sols:
            self_inv = False
            witnesses.append((q, alg.element(_simplest(sols))))
        else:
            witnesses.append((q, None))
    maximal = is_maximal_subfield(K.basis)
    if not maximal:
        self_inv = False
    rng = random.Random(seed)
    degmax = K.degree
    for _ in range(4):
        y = K.element([rng.randint(-3, 3) for _ in range(K.degree)])
        if y:
            degmax = max(degmax, y.degree())
    return SubfieldReport(
        e, K.min_poly, K.degree, roots, maximal, self_inv, witnesses, degmax, cent_dim
    )


@dataclass
class SpanClosure:
    basis: list[AlgebraElement]
    dim_K: int
    dim_F: int
    stabilized_at: int
    closed: bool
    division_check: bool
    inverted: int = 0
    failures: list[AlgebraElement] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "dim_F": self.dim_F,
            "dim_K": self.dim_K,
            "stabilized_at": self.stabilized_at,
            "closed": self.closed,
            "division_check": self.division_check,
            "inverted_samples": self.inverted,
        }


def span_closure(
    K_basis: Sequence[AlgebraElement], x: AlgebraElement, samples: int = 50, seed: int = 0
) -> SpanClosure:
    """Left ``K``-span of ``1, x, x^2, ...`` with closure and inversion checks."""
    xi = x.inverse()
    for k in K_basis:
        if not in_span(K_basis, x * k * xi):
            raise NormalizationError(k)
    dim_k = linalg.span_rank(_coords(K_basis))
    spanning: list[AlgebraElement] = []
    r = 0
    power = x.alg.one
    j = 0
    while True:
        spanning.extend(k * power for k in K_basis)
        r_new = linalg.span_rank(_coords(spanning))
        if r_new == r:
            break
        r = r_new
        power = power * x
        j += 1
    basis = [x.alg.element(v) for v in linalg.row_basis(_coords(spanning))]
    closed = all(in_span(basis, a * b) for a in basis for b in basis)
    rng = random.Random(seed)
    inverted = 0
    failures = []
    for _ in range(samples):
        y = x.alg.zero
        for b in basis:
            y = y + b * rng.randint(-3, 3)
        if not y:
            continue
        try:
            yi = y.inverse()
        except NotInvertible:
            failures.append(y)
            continue
        if in_span(basis, yi):
            inverted += 1
        else:
            failures.append(y)
    return SpanClosure(basis, r // dim_k, r, j, closed, not failures, inverted, failures)


@dataclass
class PrimitiveElement:
    c: AlgebraElement
    lam: int | None
    dim: int


def primitive_element(a: AlgebraElement, b: AlgebraElement, cap: int = 64) -> PrimitiveElement:
    """``c = a + lam b`` with ``F(c) = F(a, b)`` for commuting ``a``, ``b``."""
    if not a.commutes_with(b):
        raise ValueError("a and b must commute")
    da, db = a.degree(), b.degree()
    monos = [a**i * b**j for i in range(da) for j in range(db)]
    dim = linalg.span_rank(_coords(monos))
    if da == 1:
        return PrimitiveElement(b, None, dim)
    for lam in range(0, cap + 1):
        c = a + b * lam
        if c.degree() == dim:
            return PrimitiveElement(c, lam, dim)
    raise RuntimeError(f"no primitive element a + lam*b with lam <= {cap}")


def autocommutator_probe(K: Subfield, root: Sequence, height: int = 3):
    """Find ``x`` in ``K*`` with ``x^-1 tau(x)`` outside ``F``.

    Returns the witness or the string ``"Exhausted"``.
    """
    root = _trim(root)
    if root == [0, 1]:
        raise ValueError("tau must be a nontrivial automorphism")
    m = K.degree
    for coeffs in _ordered_coords(m, range(-height, height + 1)):
        if not any(coeffs):
            continue
        x = K.element(coeffs)
        tx = K.element(poly_compose(list(coeffs), root, K.min_poly))
        ac = x.inverse() * tx
        if not ac.is_scalar:
            return x
    return "Exhausted"


def standard_subfields(alg: CyclicAlgebra) -> dict[str, Subfield]:
    return {"v": Subfield(alg.v), "u": Subfield(alg.u)}
