"""Truncated Mal'cev-Neumann series over a Magnus-ordered free group.

A :class:`Series` stores finitely many terms ``a_g * g`` in increasing Magnus
order together with a precision marker.  ``prec is None`` means the series is
exact; ``prec = p`` (printed ``O(> p)``) means the true element differs from
the stored terms only by terms whose words are strictly greater than ``p``.
Every stored word is ``<= p``.

Multiplication is twisted: ``(a g)(b h) = a sigma_g(b) gh``.  Precision is
propagated from order bi-invariance.  If ``alpha = A + (tail > p)`` and
``beta = B + (tail > q)`` then the unknown part of ``alpha*beta`` lies
strictly above ``min(lo(alpha) q, p lo(beta))`` where ``lo`` is the valuation
when terms are stored and the marker otherwise.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .coeffield import (
    Coeff,
    Field,
    FieldAut,
    TwistSpec,
    format_coeff,
    inverse as coeff_inverse,
    is_compound,
    twist_of_word,
)
from .freegroup import (
    Word,
    format_word,
    magnus_key,
    power_exponent,
    sign,
    words_up_to,
)

DEFAULT_DEPTH = 8

_WORD_KEY = magnus_key()


class ZeroSeriesError(ValueError):
    """The valuation (or an inverse) was requested for the zero series."""


class IndeterminateValuation(ValueError):
    """All stored terms are gone but the hidden tail may be nonzero."""


class RingMismatch(TypeError):
    pass


def min_prec(*precs: Word | None) -> Word | None:
    """Smallest marker; ``None`` (exact) acts as +infinity."""
    finite = [p for p in precs if p is not None]
    return min(finite) if finite else None


class SeriesRing:
    """Session data shared by all series: coefficient field, twist, rank."""

    def __init__(
        self,
        field: Field | None = None,
        twist: TwistSpec | None = None,
        rank: int = 2,
        depth: int = DEFAULT_DEPTH,
    ):
        if rank < 2:
            raise ValueError("the free group must be non-cyclic (rank >= 2)")
        self.field = field if field is not None else Field()
        self.twist = twist if twist is not None else TwistSpec.trivial(rank)
        if self.twist.rank != rank:
            raise ValueError(f"twist has {self.twist.rank} images, rank is {rank}")
        if self.field.is_rational and not self.twist.is_trivial:
            raise ValueError("Aut(Q) is trivial; a conjugation twist needs Q(sqrt d)")
        self.rank = rank
        self.depth = depth

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SeriesRing)
            and self.field == other.field
            and self.twist == other.twist
            and self.rank == other.rank
        )

    def __hash__(self) -> int:
        return hash((self.field, self.twist, self.rank))

    def __repr__(self) -> str:
        return f"SeriesRing({self.field.name}, twist={self.twist.names()}, rank={self.rank})"

    @property
    def is_untwisted(self) -> bool:
        return self.twist.is_trivial

    def sigma(self, w: Word) -> FieldAut:
        return twist_of_word(self.twist, w)

    def make(self, raw_terms: Iterable[tuple[Word, object]], prec: Word | None = None) -> Series:
        return make_series(self, raw_terms, prec)

    def monomial(self, w: Word, c=1) -> Series:
        return make_series(self, [(w, c)])

    def scalar(self, c) -> Series:
        return make_series(self, [(Word(), c)])

    def generator(self, i: int) -> Series:
        return self.monomial(Word.generator(i))

    @property
    def zero(self) -> Series:
        return Series(self, (), None)

    @property
    def one(self) -> Series:
        return self.scalar(1)

    def big_o(self, p: Word) -> Series:
        """The unknown-but-above-``p`` series ``O(> p)``."""
        return Series(self, (), p)

    def parse(self, text: str, depth: int | None = None) -> Series:
        from .expr import evaluate, parse

        return evaluate(parse(text, rank=self.rank), self, depth)

    # hooks for expr.evaluate
    def expr_scalar(self, a, b) -> Series:
        return self.scalar(self.field(a, b) if b else self.field(a))

    def expr_word(self, w: Word) -> Series:
        if w.max_generator > self.rank:
            raise ValueError(f"{w} uses a generator outside rank {self.rank}")
        return self.monomial(w)

    def expr_inverse(self, a: Series, depth: int | None) -> Series:
        return invert(a, depth)

    def expr_conj(self, g: Series, a: Series, depth: int | None) -> Series:
        return conjugate(g, a, depth)

    def expr_big_o(self, w: Word) -> Series:
        return self.big_o(w)


class Series:
    __slots__ = ("ring", "terms", "prec")

    def __init__(self, ring: SeriesRing, terms: tuple[tuple[Word, Coeff], ...], prec: Word | None):
        # use make_series for unsorted input
        self.ring = ring
        self.terms = terms
        self.prec = prec

    @property
    def is_exact(self) -> bool:
        return self.prec is None

    @property
    def is_zero(self) -> bool:
        """Exactly zero (no stored terms and no hidden tail)."""
        return not self.terms and self.prec is None

    @property
    def support(self) -> tuple[Word, ...]:
        return tuple(w for w, _ in self.terms)

    def coefficient(self, w: Word) -> Coeff:
        for g, c in self.terms:
            if g == w:
                return c
        if self.prec is not None and w > self.prec:
            raise IndeterminateValuation(f"coefficient of {w} is beyond precision")
        return self.ring.field.zero

    def leading_term(self) -> tuple[Word, Coeff]:
        valuation(self)
        return self.terms[0]

    def truncate(self, p: Word) -> Series:
        return make_series(self.ring, self.terms, min_prec(self.prec, p))

    def with_prec(self, p: Word | None) -> Series:
        return make_series(self.ring, self.terms, p)

    def __add__(self, other) -> Series:
        return add(self, _coerce(self.ring, other))

    def __radd__(self, other) -> Series:
        return add(_coerce(self.ring, other), self)

    def __neg__(self) -> Series:
        return Series(self.ring, tuple((w, -c) for w, c in self.terms), self.prec)

    def __sub__(self, other) -> Series:
        return add(self, -_coerce(self.ring, other))

    def __rsub__(self, other) -> Series:
        return add(_coerce(self.ring, other), -self)

    def __mul__(self, other) -> Series:
        return mul(self, _coerce(self.ring, other))

    def __rmul__(self, other) -> Series:
        return mul(_coerce(self.ring, other), self)

    def __pow__(self, n: int) -> Series:
        if n < 0:
            return invert(self, self.ring.depth) ** (-n)
        out = self.ring.one
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms and self.prec == other.prec

    def __hash__(self) -> int:
        return hash((self.terms, self.prec))

    def __repr__(self) -> str:
        return f"Series({format_series(self)!r})"

    def __str__(self) -> str:
        return format_series(self)


def _coerce(ring: SeriesRing, x) -> Series:
    if isinstance(x, Series):
        if x.ring is not ring and x.ring != ring:
            raise RingMismatch(f"{x.ring!r} vs {ring!r}")
        return x
    if isinstance(x, Word):
        return ring.monomial(x)
    return ring.scalar(x)


def _check_ring(a: Series, b: Series) -> SeriesRing:
    if a.ring is not b.ring and a.ring != b.ring:
        raise RingMismatch(f"{a.ring!r} vs {b.ring!r}")
    return a.ring


def make_series(ring: SeriesRing, raw_terms: Iterable[tuple[Word, object]], prec: Word | None = None) -> Series:
    """Merge duplicates, drop zeros and terms beyond ``prec``, sort by Magnus order."""
    acc: dict[Word, Coeff] = {}
    fld = ring.field
    for w, c in raw_terms:
        c = fld(c)
        if w in acc:
            acc[w] = acc[w] + c
        else:
            acc[w] = c
    items = [(w, c) for w, c in acc.items() if c]
    if prec is not None:
        items = [(w, c) for w, c in items if not sign(prec.inverse() * w) > 0]
    items.sort(key=lambda t: _WORD_KEY(t[0]))
    return Series(ring, tuple(items), prec)


def add(a: Series, b: Series) -> Series:
    ring = _check_ring(a, b)
    return make_series(ring, a.terms + b.terms, min_prec(a.prec, b.prec))


def _lower(a: Series) -> Word:
    return a.terms[0][0] if a.terms else a.prec


def mul(a: Series, b: Series, cut: Word | None = None) -> Series:
    """Twisted product; ``cut`` additionally discards everything above a word."""
    ring = _check_ring(a, b)
    if a.is_zero or b.is_zero:
        return ring.zero
    markers = []
    if b.prec is not None:
        markers.append(_lower(a) * b.prec)
    if a.prec is not None:
        markers.append(a.prec * _lower(b))
    if cut is not None:
        markers.append(cut)
    prec = min_prec(*markers)
    acc: dict[Word, Coeff] = {}
    for g, c in a.terms:
        aut = ring.sigma(g)
        for h, d in b.terms:
            t = g * h
            v = c * aut(d)
            acc[t] = acc[t] + v if t in acc else v
    return make_series(ring, acc.items(), prec)


def valuation(a: Series) -> Word:
    """Least word of the support; defined on nonzero series only."""
    if a.is_zero:
        raise ZeroSeriesError("the valuation is undefined on 0")
    if not a.terms:
        raise IndeterminateValuation(f"no stored terms below the precision marker {a.prec}")
    return a.terms[0][0]


def monomial_inverse(ring: SeriesRing, w: Word, c: Coeff) -> Series:
    """``(c w)^-1 = sigma_{w^-1}(c^-1) w^-1``."""
    wi = w.inverse()
    return ring.monomial(wi, ring.sigma(wi)(coeff_inverse(c)))


def invert(a: Series, depth: int | None = None) -> Series:
    """Truncated inverse.

    Writes ``a = m (1 + eps)`` with ``m`` the leading monomial and
    ``v(eps) > 1``, then returns ``sum_{i<=depth} (-eps)^i m^-1``.  The
    neglected powers lie above ``v(eps)^(depth+1)``, so the result is exact
    up to the marker ``v(eps)^depth m^-1``.
    """
    ring = a.ring
    if depth is None:
        depth = ring.depth
    if depth < 0:
        raise ValueError("depth must be non-negative")
    w, c = a.terms[0] if a.terms else (valuation(a), None)
    m_inv = monomial_inverse(ring, w, c)
    eps = mul(m_inv, a) - ring.one
    if eps.is_zero:
        return m_inv
    if not eps.terms:
        # eps is unknown but above its marker, which is >= 1
        return mul(ring.one.with_prec(eps.prec), m_inv)
    cut = valuation(eps) ** depth
    neg = -eps
    total = ring.one
    power = ring.one
    for _ in range(depth):
        power = mul(power, neg, cut=cut)
        total = total + power
    total = total.truncate(cut)
    return mul(total, m_inv)


def conjugate(gamma: Series, a: Series, depth: int | None = None) -> Series:
    """``gamma a gamma^-1``."""
    return mul(mul(gamma, a), invert(gamma, depth))


def agree(a: Series, b: Series) -> bool:
    """Equal on every term up to the smaller of the two precision markers."""
    return not (a - b).terms


def commutes(a: Series, b: Series) -> bool:
    return agree(mul(a, b), mul(b, a))


def is_scalar(a: Series) -> bool:
    return all(not w for w, _ in a.terms)


def noncentral_witness(a: Series) -> Word | None:
    """A generator ``g`` with ``g a != a g`` within precision, if any."""
    ring = a.ring
    for i in range(1, ring.rank + 1):
        g = ring.generator(i)
        if not commutes(g, a):
            return Word.generator(i)
    return None


# Laurent membership ---------------------------------------------------------

@dataclass(frozen=True)
class Membership:
    """Outcome of testing whether a series is supported on powers of ``h``.

    ``status`` is ``"yes"``, ``"no"`` (``witness`` is the least offending
    word) or ``"indeterminate"`` (nothing stored below the marker).  A
    ``"yes"`` on an inexact series holds up to ``precision`` only.
    """

    status: str
    witness: Word | None = None
    precision: Word | None = None

    def __bool__(self) -> bool:
        return self.status == "yes"


def laurent_membership(a: Series, h: Word) -> Membership:
    if not h:
        raise ValueError("h must be nontrivial")
    for w, _ in a.terms:
        if power_exponent(w, h) is None:
            return Membership("no", witness=w, precision=a.prec)
    if not a.terms and a.prec is not None:
        return Membership("indeterminate", precision=a.prec)
    return Membership("yes", precision=a.prec)


def split_by_powers(gamma: Series, h: Word) -> tuple[Series, Series]:
    """``gamma = delta + eps``: terms on powers of ``h`` and the rest."""
    on, off = [], []
    for w, c in gamma.terms:
        (on if power_exponent(w, h) is not None else off).append((w, c))
    ring = gamma.ring
    return (
        Series(ring, tuple(on), gamma.prec),
        Series(ring, tuple(off), gamma.prec),
    )


# Conjugation normalization ---------------------------------------------------------

@dataclass
class CohnResult:
    beta: Series
    alpha: Series  # beta * alpha * beta^-1 as computed
    success: bool
    residual: tuple[Word, Coeff] | None
    steps: list[Word] = field(default_factory=list)  # residual word after each accepted step
    rejected: int = 0


def _least_off(a: Series, h: Word) -> tuple[Word, Coeff] | None:
    for w, c in a.terms:
        if power_exponent(w, h) is None:
            return w, c
    return None


def cohn_normalize(
    alpha: Series,
    budget: int,
    depth: int | None = None,
    radius: int = 1,
) -> CohnResult:
    """Best-effort search for ``beta`` moving ``alpha`` into ``Delta((h))``.

    Each step conjugates by ``1 + c k`` with ``k > 1``, ``c`` solved so the
    least off-``<h>`` term cancels to first order.  Candidates for ``k`` are
    ``w h^-1``, ``h^-1 w`` and the words of length <= ``radius`` times those.
    A step is kept only when the least off-``<h>`` word strictly increases
    (or disappears), so the loop ends within ``budget`` steps.
    """
    h = valuation(alpha)
    if not sign(h) > 0:
        raise ValueError(f"cohn_normalize needs v(alpha) > 1, got {h}")
    ring = alpha.ring
    if depth is None:
        depth = ring.depth
    beta = ring.one
    current = alpha
    steps: list[Word] = []
    rejected = 0
    off = _least_off(current, h)
    for _ in range(budget):
        if off is None:
            break
        w, b = off
        improved = None
        for k in _cohn_candidates(w, h, ring.rank, radius):
            # first-order change from conjugating by 1 + c k is c (k a - a k)
            kk = ring.monomial(k)
            diff = mul(kk, current) - mul(current, kk)
            d = _coeff_or_zero(diff, w)
            if not d:
                continue
            step = ring.one + ring.monomial(k, -b * coeff_inverse(d))
            trial = conjugate(step, current, depth)
            if valuation(trial) != h:
                rejected += 1
                continue
            new_off = _least_off(trial, h)
            if new_off is None or new_off[0] > w:
                improved = (step, trial, new_off)
                break
            rejected += 1
        if improved is None:
            break
        step, current, off = improved
        beta = mul(step, beta)
        steps.append(off[0] if off is not None else h)
    return CohnResult(beta, current, off is None, off, steps, rejected)


def _coeff_or_zero(a: Series, w: Word):
    for g, c in a.terms:
        if g == w:
            return c
    return 0


def _cohn_candidates(w: Word, h: Word, rank: int, radius: int) -> list[Word]:
    base = [w * h.inverse(), h.inverse() * w]
    out: list[Word] = []
    seen = set()
    for k in base:
        for c in words_up_to(radius, rank):
            for cand in (c * k, k * c):
                if cand not in seen and sign(cand) > 0:
                    seen.add(cand)
                    out.append(cand)
    # shortest candidates first, the two exact cancellations lead
    out.sort(key=lambda k: (k not in base, len(k)))
    return out


# Self-invariance probe ------------------------------------------------------

CASES = ("Case1", "Case2", "Case3", "NoViolation")


@dataclass
class ProbeTrace:
    """Record of one run of the self-invariance probe.

    ``case_tag`` compares ``v(eps h^ell)`` with ``v(lambda eps)``: Case1 when
    the first is larger, Case2 when smaller, Case3 when equal.  NoViolation
    means no ``ell`` in range produced a non-Laurent ``lambda``; that is
    inconclusive, not a certificate.
    """

    gamma: Series
    h: Word
    ell: int | None
    delta: Series
    epsilon: Series
    lam: Series | None
    case_tag: str
    witness: Word | None = None
    tried: list[int] = field(default_factory=list)
    left: Word | None = None  # v(eps h^ell)
    right: Word | None = None  # v(lambda eps)

    @property
    def violation(self) -> bool:
        return self.case_tag != "NoViolation"


def case_tag(left: Word, right: Word) -> str:
    if left > right:
        return "Case1"
    if left < right:
        return "Case2"
    return "Case3"


def self_invariance_probe(
    gamma: Series, h: Word, ell_range: Sequence[int] | range, depth: int | None = None
) -> ProbeTrace:
    if gamma.is_zero:
        raise ZeroSeriesError("gamma must be nonzero")
    if not sign(h) > 0:
        raise ValueError(f"h must be > 1, got {h}")
    ring = gamma.ring
    delta, eps = split_by_powers(gamma, h)
    gamma_inv = invert(gamma, depth)
    tried = []
    for ell in ell_range:
        tried.append(ell)
        hl = ring.monomial(h ** ell)
        lam = mul(mul(gamma, hl), gamma_inv)
        m = laurent_membership(lam, h)
        if m.status != "no":
            continue
        left = right = None
        tag = "Case3"
        if eps.terms:
            left = valuation(mul(eps, hl))
            right = valuation(mul(lam, eps))
            tag = case_tag(left, right)
        return ProbeTrace(gamma, h, ell, delta, eps, lam, tag, m.witness, tried, left, right)
    return ProbeTrace(gamma, h, None, delta, eps, None, "NoViolation", None, tried)


# Text form ------------------------------------------------------------------

def format_term(w: Word, c: Coeff, first: bool) -> str:
    neg = not is_compound(c) and _is_negative(c)
    mag = -c if neg else c
    ctext = format_coeff(mag)
    if is_compound(mag):
        ctext = f"({ctext})"
    if not w:
        body = ctext
    elif mag == 1:
        body = format_word(w)
    else:
        body = f"{ctext}*{format_word(w)}"
    if first:
        return ("-" if neg else "") + body
    return (" - " if neg else " + ") + body


def _is_negative(c: Coeff) -> bool:
    if isinstance(c, Fraction):
        return c < 0
    # pure rational or pure irrational Quad
    return (c.b == 0 and c.a < 0) or (c.a == 0 and c.b < 0)


def format_series(a: Series) -> str:
    parts = [format_term(w, c, i == 0) for i, (w, c) in enumerate(a.terms)]
    if a.prec is not None:
        tail = f"O(> {format_word(a.prec)})"
        parts.append(tail if not parts else " + " + tail)
    return "".join(parts) if parts else "0"


# Random sampling ----------------------------------------------------------------

SAMPLE_COEFFS = (Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2))


def random_coeff(ring: SeriesRing, rng: random.Random) -> Coeff:
    c = rng.choice(SAMPLE_COEFFS)
    if ring.field.is_rational or rng.random() < 0.5:
        return ring.field(c)
    return ring.field(c, rng.choice(SAMPLE_COEFFS))


def random_series(
    ring: SeriesRing,
    rng: random.Random,
    max_terms: int = 4,
    max_len: int = 4,
    min_terms: int = 1,
    words: Sequence[Word] | None = None,
) -> Series:
    """Nonzero exact series with ``min_terms..max_terms`` distinct words."""
    pool = list(words) if words is not None else words_up_to(max_len, ring.rank)
    n = rng.randint(min_terms, max_terms)
    chosen = rng.sample(pool, min(n, len(pool)))
    return ring.make([(w, random_coeff(ring, rng)) for w in chosen])
