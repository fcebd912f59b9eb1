"""One grammar for words, coefficients, series and cyclic-algebra elements.

::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (['*'] factor)*          juxtaposition multiplies
    factor := atom ('^' ['-'] INT)*
    atom   := INT ['/' INT] | 'r' | WORD | '(' expr ')'
            | 'conj' '(' expr ';' expr ')' | 'O' '(' '>' WORD ')'

A WORD is a run of generator letters; an uppercase letter is the inverse of
its lowercase form and ``x1 .. xk`` (``X1 .. Xk`` for inverses) name
generators by index.  A power binds
to the last letter of a run: ``xy^-1`` is ``x*y^-1``.  ``r`` is sqrt d,
``O(> w)`` is an unknown tail above ``w``.  Precedence is ``^`` over
``*``/juxtaposition over ``+``/``-``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .freegroup import LETTERS, Word


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        self.offset = offset
        self.expected = expected
        exp = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{message} at offset {offset}{exp}")


# AST -----------------------------------------------------------------------

@dataclass(frozen=True)
class Coefficient:
    a: Fraction
    b: Fraction = Fraction(0)  # multiple of sqrt d


@dataclass(frozen=True)
class WordAtom:
    word: Word


@dataclass(frozen=True)
class Sum:
    terms: tuple


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class Product:
    factors: tuple


@dataclass(frozen=True)
class Inverse:
    operand: object


@dataclass(frozen=True)
class Power:
    base: object
    exponent: int


@dataclass(frozen=True)
class Conjugation:
    gamma: object
    alpha: object


@dataclass(frozen=True)
class BigO:
    word: Word


# Tokens ----------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # INT WORD R O CONJ or the punctuation character itself
    text: str
    offset: int
    value: object = None


_PUNCT = set("+-*/^();>")
_ATOM_START = frozenset({"INT", "WORD", "R", "(", "CONJ", "O"})


def tokenize(text: str, alphabet: str) -> list[Token]:
    out: list[Token] = []
    i, n = 0, len(text)
    lower = set(alphabet)
    upper = {c.upper() for c in alphabet}
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            out.append(Token("INT", text[i:j], i, int(text[i:j])))
            i = j
            continue
        if text.startswith("conj", i) and text[i + 4 : i + 5].lstrip().startswith("("):
            out.append(Token("CONJ", "conj", i))
            i += 4
            continue
        if ch == "O":
            out.append(Token("O", ch, i))
            i += 1
            continue
        if ch == "r" and "r" not in lower:
            out.append(Token("R", ch, i))
            i += 1
            continue
        if ch in lower or ch in upper:
            letters = []
            j = i
            while j < n:
                c = text[j]
                if c in "xX" and "x" in lower and j + 1 < n and text[j + 1].isdigit():
                    k = j + 1
                    while k < n and text[k].isdigit():
                        k += 1
                    idx = int(text[j + 1 : k])
                    if not 1 <= idx <= len(alphabet):
                        raise ParseError(f"generator x{idx} outside rank {len(alphabet)}", j)
                    letters.append(idx if c == "x" else -idx)
                    j = k
                elif c in lower:
                    letters.append(alphabet.index(c) + 1)
                    j += 1
                elif c in upper:
                    letters.append(-(alphabet.index(c.lower()) + 1))
                    j += 1
                else:
                    break
            out.append(Token("WORD", text[i:j], i, tuple(letters)))
            i = j
            continue
        if ch in _PUNCT:
            out.append(Token(ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    out.append(Token("EOF", "", n))
    return out


class _Parser:
    def __init__(self, text: str, alphabet: str):
        self.text = text
        self.tokens = tokenize(text, alphabet)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def take(self, kind: str) -> Token:
        t = self.tok
        if t.kind != kind:
            raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.offset, frozenset({kind}))
        self.pos += 1
        return t

    def parse(self):
        node = self.expr()
        if self.tok.kind != "EOF":
            raise ParseError(
                f"unexpected {self.tok.text!r}", self.tok.offset, frozenset({"+", "-", "*", "EOF"})
            )
        return node

    def expr(self):
        terms = []
        negate = False
        if self.tok.kind in ("+", "-"):
            negate = self.tok.kind == "-"
            self.pos += 1
        t = self.term()
        terms.append(Neg(t) if negate else t)
        while self.tok.kind in ("+", "-"):
            negate = self.tok.kind == "-"
            self.pos += 1
            t = self.term()
            terms.append(Neg(t) if negate else t)
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while True:
            if self.tok.kind == "*":
                self.pos += 1
                factors.append(self.factor())
            elif self.tok.kind in _ATOM_START:
                factors.append(self.factor())
            else:
                break
        flat = []
        for f in factors:
            flat.extend(f.factors if isinstance(f, Product) else (f,))
        return flat[0] if len(flat) == 1 else Product(tuple(flat))

    def factor(self):
        t = self.tok
        node = self.atom()
        if self.tok.kind == "^" and t.kind == "WORD" and len(t.value) > 1:
            # a power binds to the last letter of a run
            head = WordAtom(Word(t.value[:-1]))
            node = self.powers(WordAtom(Word(t.value[-1:])))
            return Product((head, node))
        return self.powers(node)

    def powers(self, node):
        while self.tok.kind == "^":
            self.pos += 1
            neg = False
            if self.tok.kind == "-":
                neg = True
                self.pos += 1
            n = self.take("INT").value
            if neg:
                node = Inverse(node) if n == 1 else Inverse(Power(node, n))
            else:
                node = Power(node, n)
        return node

    def atom(self):
        t = self.tok
        if t.kind == "INT":
            self.pos += 1
            if self.tok.kind == "/":
                self.pos += 1
                den = self.take("INT")
                if den.value == 0:
                    raise ParseError("zero denominator", den.offset)
                return Coefficient(Fraction(t.value, den.value))
            return Coefficient(Fraction(t.value))
        if t.kind == "R":
            self.pos += 1
            return Coefficient(Fraction(0), Fraction(1))
        if t.kind == "WORD":
            self.pos += 1
            return WordAtom(Word(t.value))
        if t.kind == "(":
            self.pos += 1
            node = self.expr()
            self.take(")")
            return node
        if t.kind == "CONJ":
            self.pos += 1
            self.take("(")
            g = self.expr()
            self.take(";")
            a = self.expr()
            self.take(")")
            return Conjugation(g, a)
        if t.kind == "O":
            self.pos += 1
            self.take("(")
            self.take(">")
            w = self.bare_word()
            self.take(")")
            return BigO(w)
        raise ParseError(
            f"unexpected {t.text or 'end of input'!r}", t.offset, _ATOM_START
        )

    def bare_word(self) -> Word:
        t = self.tok
        if t.kind == "WORD":
            self.pos += 1
            return Word(t.value)
        if t.kind == "INT" and t.value == 1:
            self.pos += 1
            return Word()
        raise ParseError(f"expected a word, got {t.text!r}", t.offset, frozenset({"WORD", "1"}))


def _alphabet(rank: int | None, alphabet: str | None) -> str:
    if alphabet is not None:
        return alphabet
    return LETTERS[: rank if rank is not None else 2]


def parse(text: str, rank: int | None = 2, alphabet: str | None = None):
    return _Parser(text, _alphabet(rank, alphabet)).parse()


def parse_word(text: str, rank: int | None = None, alphabet: str | None = None) -> Word:
    """Parse a group word: letters, ``*``, ``^n`` and parentheses only."""
    alpha = _alphabet(rank if rank is not None else len(LETTERS), alphabet)
    node = _Parser(text, alpha).parse()
    return _word_value(node, text)


def _word_value(node, text: str) -> Word:
    if isinstance(node, WordAtom):
        return node.word
    if isinstance(node, Coefficient) and node.a == 1 and node.b == 0:
        return Word()
    if isinstance(node, Product):
        out = Word()
        for f in node.factors:
            out = out * _word_value(f, text)
        return out
    if isinstance(node, Inverse):
        return _word_value(node.operand, text).inverse()
    if isinstance(node, Power):
        return _word_value(node.base, text) ** node.exponent
    raise ParseError(f"not a group word: {text!r}", 0)


def parse_coefficient(text: str, field):
    node = _Parser(text, "").parse()
    return _coeff_value(node, field, text)


def _coeff_value(node, field, text):
    if isinstance(node, Coefficient):
        return field(node.a, node.b) if node.b else field(node.a)
    if isinstance(node, Neg):
        return -_coeff_value(node.operand, field, text)
    if isinstance(node, Sum):
        out = field(0)
        for t in node.terms:
            out = out + _coeff_value(t, field, text)
        return out
    if isinstance(node, Product):
        out = field(1)
        for f in node.factors:
            out = out * _coeff_value(f, field, text)
        return out
    raise ParseError(f"not a coefficient: {text!r}", 0)


def evaluate(node, target, depth: int | None = None):
    """Evaluate an AST in a series ring or a cyclic algebra.

    ``target`` supplies ``expr_scalar``, ``expr_word``, ``expr_inverse``,
    ``expr_big_o`` and ``expr_conj``; sums and products use the operators
    of the values it returns.
    """
    def ev(n):
        if isinstance(n, Coefficient):
            return target.expr_scalar(n.a, n.b)
        if isinstance(n, WordAtom):
            return target.expr_word(n.word)
        if isinstance(n, Sum):
            out = ev(n.terms[0])
            for t in n.terms[1:]:
                out = out + ev(t)
            return out
        if isinstance(n, Neg):
            return -ev(n.operand)
        if isinstance(n, Product):
            out = ev(n.factors[0])
            for f in n.factors[1:]:
                out = out * ev(f)
            return out
        if isinstance(n, Inverse):
            return target.expr_inverse(ev(n.operand), depth)
        if isinstance(n, Power):
            base = ev(n.base)
            out = target.expr_scalar(Fraction(1), Fraction(0))
            for _ in range(n.exponent):
                out = out * base
            return out
        if isinstance(n, Conjugation):
            return target.expr_conj(ev(n.gamma), ev(n.alpha), depth)
        if isinstance(n, BigO):
            return target.expr_big_o(n.word)
        raise TypeError(f"unknown node {n!r}")

    return ev(node)
