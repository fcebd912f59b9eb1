"""Bounded evidence for the subnormal chain ``N_i = v^-1(<x>_i)``.

Everything here is one-sided: a certificate proves membership of a
valuation in the iterated normal closure, while a miss is only inconclusive.
Minimality of the chain length (the subnormal-depth lower bound for free
groups) quantifies over all chains of an infinite group and is recorded as
an imported theorem, never checked.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .freegroup import (
    DEFAULT_BALL_BUDGET,
    Derivation,
    Word,
    WordBall,
    format_word,
    normal_closure_ball,
    sort_by_length,
    words_up_to,
)
from .mnseries import Series, SeriesRing, conjugate, random_coeff, valuation

IMPORTED = (
    "a nontrivial subgroup of <g>_n that is l-subnormal in a non-cyclic free group has l >= n",
    "the normalizer of <h> in a free group is abelian",
)


@dataclass(frozen=True)
class ChainLevel:
    x: Word
    n: int
    L: int
    rank: int = 2
    budget: int = DEFAULT_BALL_BUDGET

    @property
    def ball(self) -> WordBall:
        return normal_closure_ball(self.x, self.n, self.L, self.rank, self.budget)


@dataclass(frozen=True)
class Certificate:
    alpha_valuation: Word
    witness: Derivation

    def replay(self) -> bool:
        return self.witness.value() == self.alpha_valuation

    def to_json(self):
        return {
            "valuation": format_word(self.alpha_valuation),
            "depth": self.witness.depth,
            "derivation": self.witness.to_json(),
        }


class Inconclusive:
    """Valuation not found in the bounded ball; says nothing about membership."""

    def __init__(self, alpha_valuation: Word):
        self.alpha_valuation = alpha_valuation

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return f"Inconclusive({format_word(self.alpha_valuation)})"


def chain_member_certificate(alpha: Series, level: ChainLevel) -> Certificate | Inconclusive:
    v = valuation(alpha)
    if level.n == 0:
        return Certificate(v, Derivation(level.x, 0, word=v))
    d = level.ball.derivation(v)
    if d is None:
        return Inconclusive(v)
    return Certificate(v, d)


def conjugated_derivation(d: Derivation, c: Derivation) -> Derivation:
    """Derivation for ``c w c^-1`` from one for ``w`` (depth n) and ``c`` (depth n-1)."""
    return d.conjugate_by(c)


# Sampling -------------------------------------------------------------------

def sample_member(
    ring: SeriesRing, rng: random.Random, ball: WordBall, pool: list[Word], max_terms: int = 4
) -> Series:
    """A series whose valuation is a random certified member of ``ball``.

    Extra terms come from ``pool`` (the length <= 4 words) and lie above the
    chosen valuation, so the valuation is known by construction.
    """
    members = sort_by_length(ball.derivations)
    lead = rng.choice(members)
    above = [w for w in pool if w > lead]
    n_extra = rng.randint(0, min(max_terms - 1, len(above)))
    extra = rng.sample(above, n_extra)
    return ring.make([(lead, random_coeff(ring, rng))] + [(w, random_coeff(ring, rng)) for w in extra])


@dataclass
class LevelReport:
    depth: int
    ball_size: int
    prev_ball_size: int
    included: bool
    missing: list[Word]
    samples: int
    certified: int
    enlarged_hits: int
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.included and not self.counterexamples

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "ball_size": self.ball_size,
            "prev_ball_size": self.prev_ball_size,
            "inclusion": self.included,
            "missing": [format_word(w) for w in self.missing],
            "samples": self.samples,
            "certified": self.certified,
            "enlarged_ball_hits": self.enlarged_hits,
            "counterexamples": self.counterexamples,
            "pass": self.passed,
        }


@dataclass
class ChainReport:
    x: Word
    max_depth: int
    L: int
    levels: list[LevelReport]
    seed: int
    imported: tuple[str, ...] = IMPORTED

    @property
    def passed(self) -> bool:
        return all(level.passed for level in self.levels)

    def to_json(self) -> dict:
        return {
            "x": format_word(self.x),
            "max_depth": self.max_depth,
            "L": self.L,
            "seed": self.seed,
            "levels": [level.to_json() for level in self.levels],
            "imported_theorems": list(self.imported),
            "pass": self.passed,
        }


def chain_report(
    x: Word,
    max_depth: int,
    L: int,
    samples: int,
    ring: SeriesRing | None = None,
    seed: int = 0,
    depth: int = 4,
    budget: int = DEFAULT_BALL_BUDGET,
    enlarge: int = 2,
) -> ChainReport:
    """Inclusion and normality evidence for ``N_1 ⊵ ... ⊵ N_max_depth``.

    Normality at level ``i``: for a certified ``alpha`` in ``N_i`` and
    ``beta`` in ``N_{i-1}``, the valuation of ``beta alpha beta^-1`` must be
    ``v(beta) v(alpha) v(beta)^-1`` and must carry a replayable depth-``i``
    certificate (looked up in the ball enlarged by ``enlarge`` letters, else
    built by conjugating the derivation of ``v(alpha)``).
    """
    if not x:
        raise ValueError("x must be nontrivial")
    ring = ring if ring is not None else SeriesRing()
    rng = random.Random(seed)
    pool = words_up_to(4, ring.rank)
    levels = []
    for i in range(1, max_depth + 1):
        ball = normal_closure_ball(x, i, L, ring.rank, budget)
        prev = normal_closure_ball(x, i - 1, L, ring.rank, budget)
        missing = sort_by_length(w for w in ball.derivations if w not in prev)
        big = normal_closure_ball(x, i, L + enlarge, ring.rank, budget)
        certified = hits = 0
        bad: list[dict] = []
        for _ in range(samples):
            alpha = sample_member(ring, rng, ball, pool)
            beta = sample_member(ring, rng, prev, pool)
            va, vb = valuation(alpha), valuation(beta)
            conj = conjugate(beta, alpha, depth)
            got = valuation(conj)
            expected = va.conjugate_by(vb)
            if got != expected:
                bad.append(
                    {
                        "kind": "valuation",
                        "alpha": str(alpha),
                        "beta": str(beta),
                        "got": format_word(got),
                        "expected": format_word(expected),
                    }
                )
                continue
            if got in big:
                hits += 1
                cert = Certificate(got, big.derivation(got))
            else:
                cert = Certificate(
                    got, conjugated_derivation(ball.derivation(va), prev.derivation(vb))
                )
            if cert.replay():
                certified += 1
            else:
                bad.append(
                    {
                        "kind": "certificate",
                        "alpha": str(alpha),
                        "beta": str(beta),
                        "valuation": format_word(got),
                    }
                )
        levels.append(
            LevelReport(i, len(ball), len(prev), not missing, missing, samples, certified, hits, bad)
        )
    return ChainReport(x, max_depth, L, levels, seed)
