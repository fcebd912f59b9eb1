"""Reduced words in a free group and the Magnus bi-invariant order.

Letters are nonzero integers: ``i`` stands for the i-th generator and ``-i``
for its inverse (generators are numbered from 1).  A :class:`Word` is always
freely reduced, so equality of words is equality of group elements.

The order is induced by the Magnus embedding ``x_i -> 1 + t_i`` into
noncommuting integer power series.  ``w > 1`` exactly when the graded-lex
least monomial of ``expand(w) - 1`` carries a positive coefficient, where
monomials are compared by total degree first and then left to right on
generator indices.  With this convention ``1 < y < x`` in rank 2.
"""
from __future__ import annotations

import functools
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator

import numpy as np

DEFAULT_COMPARE_CAP = 64
DEFAULT_BALL_BUDGET = 10**6

# 'o' and 'r' are reserved by the expression grammar (O(> w), sqrt d).
LETTERS = "xyzwabcdefghijklmnpqstuv"
MAX_RANK = len(LETTERS)


class MagnusCapExceeded(RuntimeError):
    """The degree escalation in :func:`compare` ran past its cap."""


class ResourceCapExceeded(RuntimeError):
    """A bounded enumeration ran out of its node budget."""


class Order(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for a in letters:
        if a == 0:
            raise ValueError("0 is not a letter")
        if stack and stack[-1] == -a:
            stack.pop()
        else:
            stack.append(a)
    return tuple(stack)


class Word:
    """An element of a free group, stored as a freely reduced letter tuple.

    Comparison operators implement the Magnus order, so words can be sorted
    directly and ``min``/``max`` behave as in the ordered group.
    """

    __slots__ = ("letters", "_hash")

    def __init__(self, letters: Iterable[int] = ()):
        self.letters = _reduce(letters)
        self._hash = hash(self.letters)

    @classmethod
    def identity(cls) -> Word:
        return _IDENTITY

    @classmethod
    def generator(cls, i: int) -> Word:
        if i < 1:
            raise ValueError("generators are numbered from 1")
        return cls((i,))

    @classmethod
    def parse(cls, text: str) -> Word:
        # local import: the expression grammar lives with the cli front end
        from .expr import parse_word

        return parse_word(text)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __bool__(self) -> bool:
        # the identity is falsy, like an empty tuple
        return bool(self.letters)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.letters == other.letters

    def __mul__(self, other: Word) -> Word:
        if not isinstance(other, Word):
            return NotImplemented
        return Word(self.letters + other.letters)

    def inverse(self) -> Word:
        return Word(-a for a in reversed(self.letters))

    __invert__ = inverse

    def __pow__(self, n: int) -> Word:
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def conjugate_by(self, c: Word) -> Word:
        """Return ``c * self * c^-1``."""
        return Word(c.letters + self.letters + c.inverse().letters)

    def commutes_with(self, other: Word) -> bool:
        return self * other == other * self

    def exponent_sums(self, rank: int) -> tuple[int, ...]:
        sums = [0] * rank
        for a in self.letters:
            sums[abs(a) - 1] += 1 if a > 0 else -1
        return tuple(sums)

    @property
    def max_generator(self) -> int:
        return max((abs(a) for a in self.letters), default=0)

    # Magnus order -------------------------------------------------------
    def __lt__(self, other: Word) -> bool:
        return compare(self, other) is Order.LT

    def __le__(self, other: Word) -> bool:
        return compare(self, other) is not Order.GT

    def __gt__(self, other: Word) -> bool:
        return compare(self, other) is Order.GT

    def __ge__(self, other: Word) -> bool:
        return compare(self, other) is not Order.LT

    def is_positive(self) -> bool:
        return sign(self) > 0

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"


_IDENTITY = Word()


def letter_name(a: int, alphabet: str = LETTERS) -> str:
    name = alphabet[abs(a) - 1]
    return name if a > 0 else name.upper()


def format_word(w: Word, alphabet: str = LETTERS) -> str:
    """Canonical text for ``w``: ``x``/``X`` style letters, ``1`` for identity."""
    if not w.letters:
        return "1"
    return "".join(letter_name(a, alphabet) for a in w.letters)


def word_arith(u: Word, w: Word) -> Word:
    """Product in the free group."""
    return u * w


def word_inverse(w: Word) -> Word:
    return w.inverse()


# Magnus expansion ---------------------------------------------------------

@dataclass(frozen=True)
class MagnusPoly:
    """Truncated image of a word in ``Z<<t_1, ..., t_k>>``.

    ``terms`` maps index tuples (noncommutative monomials) to nonzero
    integers; the empty tuple is the constant monomial.
    """

    maxdeg: int
    terms: dict[tuple[int, ...], int] = field(default_factory=dict)

    def coefficient(self, monomial: tuple[int, ...]) -> int:
        return self.terms.get(tuple(monomial), 0)

    def leading(self) -> tuple[tuple[int, ...], int] | None:
        """Graded-lex least non-constant monomial with its coefficient."""
        nonconst = [m for m in self.terms if m]
        if not nonconst:
            return None
        m = min(nonconst, key=lambda m: (len(m), m))
        return m, self.terms[m]

    def __str__(self) -> str:
        parts = []
        for m in sorted(self.terms, key=lambda m: (len(m), m)):
            c = self.terms[m]
            mono = "*".join(f"t{i}" for i in m) if m else "1"
            parts.append(f"{c}*{mono}" if m else str(c))
        return " + ".join(parts) if parts else "0"


def _expand_letters(letters: tuple[int, ...], maxdeg: int) -> dict[tuple[int, ...], int]:
    poly: dict[tuple[int, ...], int] = {(): 1}
    for a in letters:
        i = abs(a)
        new: dict[tuple[int, ...], int] = {}
        for m, c in poly.items():
            new[m] = new.get(m, 0) + c
            room = maxdeg - len(m)
            if a > 0:
                if room >= 1:
                    key = m + (i,)
                    new[key] = new.get(key, 0) + c
            else:
                # (1 + t)^-1 = 1 - t + t^2 - ...
                for j in range(1, room + 1):
                    key = m + (i,) * j
                    new[key] = new.get(key, 0) + (c if j % 2 == 0 else -c)
        poly = {m: c for m, c in new.items() if c}
    return poly


def magnus_expand(w: Word, maxdeg: int) -> MagnusPoly:
    if maxdeg < 0:
        raise ValueError("maxdeg must be non-negative")
    return MagnusPoly(maxdeg, _expand_letters(w.letters, maxdeg))


def _graded_parts(letters: tuple[int, ...], rank: int, deg: int) -> list[np.ndarray]:
    """Homogeneous parts ``P_0 .. P_deg`` of the expansion as dense arrays.

    ``P_d`` has ``rank**d`` entries; monomial ``t_{i1}..t_{id}`` sits at the
    base-``rank`` index ``(i1-1, .., id-1)``, so array order is graded-lex
    order within a degree.
    """
    big = math.comb(len(letters) + deg, deg) >= 1 << 62
    dtype = object if big else np.int64
    parts = [np.zeros(rank**d, dtype=dtype) for d in range(deg + 1)]
    parts[0][0] = 1
    for a in letters:
        i = abs(a) - 1
        if a > 0:
            # P * (1 + t_i): each degree picks up the previous one times t_i
            for d in range(deg, 0, -1):
                parts[d].reshape(-1, rank)[:, i] += parts[d - 1]
        else:
            # P' (1 + t_i) = P, solved degree by degree
            for d in range(1, deg + 1):
                parts[d].reshape(-1, rank)[:, i] -= parts[d - 1]
    return parts


_MAX_DENSE = 1 << 22


@functools.lru_cache(maxsize=1 << 18)
def _sign(letters: tuple[int, ...], cap: int) -> int:
    if not letters:
        return 0
    # Degree one of the expansion is the exponent-sum vector.
    rank = max(abs(a) for a in letters)
    sums = [0] * (rank + 1)
    for a in letters:
        sums[abs(a)] += 1 if a > 0 else -1
    for c in sums[1:]:
        if c:
            return 1 if c > 0 else -1
    rank = max(rank, 2)
    deg = 2
    while True:
        if rank**deg > _MAX_DENSE:
            raise MagnusCapExceeded(
                f"degree {deg} expansion in rank {rank} is too large to compare"
            )
        parts = _graded_parts(letters, rank, deg)
        for d in range(2, deg + 1):
            nz = np.flatnonzero(parts[d])
            if nz.size:
                return 1 if parts[d][nz[0]] > 0 else -1
        if deg >= cap:
            raise MagnusCapExceeded(
                f"no nonzero Magnus coefficient up to degree {cap} "
                f"for a word of length {len(letters)}"
            )
        deg = min(deg + 2, cap)


def sign(w: Word, cap: int = DEFAULT_COMPARE_CAP) -> int:
    """+1 if ``w > 1``, -1 if ``w < 1``, 0 for the identity."""
    return _sign(w.letters, cap)


def compare(u: Word, w: Word, cap: int = DEFAULT_COMPARE_CAP) -> Order:
    if u.letters == w.letters:
        return Order.EQ
    return Order.LT if _sign((u.inverse() * w).letters, cap) > 0 else Order.GT


def magnus_key(cap: int = DEFAULT_COMPARE_CAP):
    return functools.cmp_to_key(lambda a, b: int(compare(a, b, cap)))


def sort_words(words: Iterable[Word]) -> list[Word]:
    return sorted(words, key=magnus_key())


# Roots and powers ---------------------------------------------------------

def cyclic_reduction(w: Word) -> tuple[Word, Word]:
    """Split ``w = c * core * c^-1`` with ``core`` cyclically reduced."""
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == -letters[j]:
        i += 1
        j -= 1
    return Word(letters[:i]), Word(letters[i : j + 1])


def primitive_root(w: Word) -> tuple[Word, int]:
    """Return ``(r, k)`` with ``w == r**k``, ``k >= 1`` and ``r`` not a proper power."""
    if not w:
        raise ValueError("the identity has no primitive root")
    c, core = cyclic_reduction(w)
    n = len(core)
    letters = core.letters
    for p in range(1, n + 1):
        if n % p == 0 and letters == letters[:p] * (n // p):
            return Word(letters[:p]).conjugate_by(c), n // p
    raise AssertionError("unreachable: p = n always matches")


def power_exponent(w: Word, h: Word) -> int | None:
    """The integer ``j`` with ``w == h**j``, or None if there is none."""
    if not h:
        raise ValueError("h must be nontrivial")
    if not w:
        return 0
    r, e = primitive_root(h)
    s, f = primitive_root(w)
    if s == r:
        pass
    elif s == r.inverse():
        f = -f
    else:
        return None
    return f // e if f % e == 0 else None


# Enumeration --------------------------------------------------------------

def letters_of_rank(rank: int) -> tuple[int, ...]:
    return tuple(itertools.chain.from_iterable((i, -i) for i in range(1, rank + 1)))


def words_up_to(length: int, rank: int = 2) -> list[Word]:
    """All reduced words of length at most ``length``, shortest first."""
    out = [Word()]
    frontier = [()]
    alphabet = letters_of_rank(rank)
    for _ in range(length):
        nxt = []
        for letters in frontier:
            for a in alphabet:
                if letters and letters[-1] == -a:
                    continue
                nxt.append(letters + (a,))
        out.extend(Word(t) for t in nxt)
        frontier = nxt
    return out


@dataclass(frozen=True)
class Derivation:
    """Why a word lies in the iterated normal closure of ``g``.

    At depth 0 the derivation is just the word (everything lies in G).  At
    depth ``n >= 1`` it is a product of factors ``c g^s c^-1`` where each
    conjugator ``c`` carries its own depth ``n - 1`` derivation.
    """

    g: Word
    depth: int
    word: Word | None = None
    factors: tuple[tuple[Derivation, int], ...] = ()

    def value(self) -> Word:
        """Replay the derivation from scratch."""
        if self.depth == 0:
            return self.word if self.word is not None else Word()
        out = Word()
        for conj, s in self.factors:
            if conj.depth != self.depth - 1:
                raise ValueError("conjugator derivation at the wrong depth")
            out = out * (self.g ** s).conjugate_by(conj.value())
        return out

    def __mul__(self, other: Derivation) -> Derivation:
        if self.g != other.g or self.depth != other.depth:
            raise ValueError("derivations of different closures")
        if self.depth == 0:
            return Derivation(self.g, 0, word=self.value() * other.value())
        return Derivation(self.g, self.depth, factors=self.factors + other.factors)

    def conjugate_by(self, c: Derivation) -> Derivation:
        """Derivation of ``c w c^-1`` given ``c`` one level up (depth - 1)."""
        if c.depth != self.depth - 1:
            raise ValueError("conjugator must come from the previous level")
        if self.depth == 0:
            raise ValueError("depth-0 derivations need no conjugation")
        return Derivation(
            self.g,
            self.depth,
            factors=tuple((c * conj, s) for conj, s in self.factors),
        )

    def to_json(self):
        if self.depth == 0:
            return format_word(self.value())
        return [[conj.to_json(), s] for conj, s in self.factors]


@dataclass(frozen=True)
class WordBall:
    """Bounded under-approximation of ``<g>_depth`` among words of length <= L.

    Presence of a word is a certificate of membership; absence says nothing.
    """

    g: Word
    depth: int
    L: int
    rank: int
    derivations: dict[Word, Derivation] = field(repr=False, compare=False)

    @property
    def members(self) -> frozenset[Word]:
        return frozenset(self.derivations)

    def __contains__(self, w: Word) -> bool:
        return w in self.derivations

    def __len__(self) -> int:
        return len(self.derivations)

    def derivation(self, w: Word) -> Derivation | None:
        return self.derivations.get(w)


@functools.lru_cache(maxsize=64)
def normal_closure_ball(
    g: Word, depth: int, L: int, rank: int = 2, budget: int = DEFAULT_BALL_BUDGET
) -> WordBall:
    """Breadth-first enumeration of the iterated normal closure of ``g``.

    Depth 0 is every reduced word of length <= L.  Depth n closes the set of
    conjugates ``c g^{+-1} c^-1`` (``c`` from the depth n-1 ball, result of
    length <= L) under multiplication, never keeping a word longer than L.
    """
    if not g:
        raise ValueError("g must be nontrivial")
    if depth < 0 or L < 0:
        raise ValueError("depth and L must be non-negative")
    if depth == 0:
        words = words_up_to(L, rank)
        if len(words) > budget:
            raise ResourceCapExceeded(f"{len(words)} words exceed budget {budget}")
        return WordBall(g, 0, L, rank, {w: Derivation(g, 0, word=w) for w in words})

    prev = normal_closure_ball(g, depth - 1, L, rank, budget)
    gens: dict[Word, Derivation] = {}
    for c in sort_by_length(prev.derivations):
        for s in (1, -1):
            w = (g ** s).conjugate_by(c)
            if len(w) <= L and w not in gens:
                gens[w] = Derivation(g, depth, factors=((prev.derivations[c], s),))

    found: dict[Word, Derivation] = {Word(): Derivation(g, depth, factors=())}
    queue = deque([Word()])
    visited = 1
    gen_items = list(gens.items())
    while queue:
        w = queue.popleft()
        dw = found[w]
        for s, ds in gen_items:
            p = w * s
            if len(p) > L or p in found:
                continue
            visited += 1
            if visited > budget:
                raise ResourceCapExceeded(
                    f"ball(g={g}, depth={depth}, L={L}) exceeded {budget} states"
                )
            found[p] = dw * ds
            queue.append(p)
    return WordBall(g, depth, L, rank, found)


def sort_by_length(words: Iterable[Word]) -> list[Word]:
    return sorted(words, key=lambda w: (len(w), w.letters))
