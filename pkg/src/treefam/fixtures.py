"""Reproducible pseudo-random fixtures.

All generators draw from a caller-provided ``random.Random`` seeded
instance (Mersenne Twister, fixed draw order), so identical seeds yield
byte-identical fixture files.  The certified-pair generator constructs
members by following the family definitions: chains flipped off the
witness at prescribed depths, skipped blocks hanging off inner witnesses,
attached blocks in separated depth windows.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable

from .dyadic import Branch
from .families import FamilyParams, Plain, Schreier
from .norms import SeqVector, Vector
from .ordinals import Ordinal


def rng_for(seed: int) -> random.Random:
    return random.Random(seed)


def random_branch(rng: random.Random, max_word: int = 6) -> Branch:
    n = rng.randint(0, max_word)
    word = "".join(rng.choice("01") for _ in range(n))
    return Branch(word, rng.randint(0, 1))


def random_vector(
    rng: random.Random, pool: Iterable[Branch], size: int, max_den: int = 4
) -> Vector:
    pool = list(pool)
    picks = rng.sample(pool, min(size, len(pool)))
    pairs = []
    for b in picks:
        num = rng.choice([v for v in range(-8, 9) if v])
        pairs.append((b, Fraction(num, rng.randint(1, max_den))))
    return Vector.from_pairs(pairs)


def random_seq_vector(
    rng: random.Random, lo: int, hi: int, size: int, max_den: int = 4
) -> SeqVector:
    picks = rng.sample(range(lo, hi + 1), min(size, hi - lo + 1))
    pairs = []
    for n in picks:
        num = rng.choice([v for v in range(-8, 9) if v])
        pairs.append((n, Fraction(num, rng.randint(1, max_den))))
    return SeqVector.from_pairs(pairs)


def _off_branch(rng: random.Random, sigma: Branch, depth: int) -> Branch:
    """A branch meeting sigma at exactly the given depth."""
    word = sigma.prefix_word(depth) + str(1 - sigma.bit(depth + 1))
    word += "".join(rng.choice("01") for _ in range(rng.randint(0, 2)))
    return Branch(word, rng.randint(0, 1))


def _build_member(
    rng: random.Random, level: int, sigma: Branch, lo: int, hi: int, budget: int
) -> frozenset[Branch]:
    """Elements whose meets with sigma lie in (lo, hi], forming a member of
    the level family with varmin > lo."""
    if level <= 1 or budget <= 1 or hi - lo < 4:
        d = max(1, min(budget, rng.randint(1, 3)))
        first = max(lo + 1, d)
        if first > hi:
            first, d = lo + 1, 1
        depths = sorted(rng.sample(range(first, hi + 1), min(d, hi - first + 1)))
        return frozenset(_off_branch(rng, sigma, l) for l in depths)
    shape = rng.choice(["lift", "skipped", "attached"])
    if shape == "lift":
        return _build_member(rng, level - 1, sigma, lo, hi, budget)
    if shape == "skipped":
        d = rng.randint(1, min(3, budget))
        first = max(lo + 1, d)
        if first + d > hi:
            d, first = 1, lo + 1
        anchors = sorted(rng.sample(range(first, min(hi, first + d + 2) + 1), d))
        out: set[Branch] = set()
        share = max(1, budget // d)
        for l in anchors:
            sig_i = _off_branch(rng, sigma, l)
            out |= _build_member(rng, level - 1, sig_i, l, l + 4, share)
        return frozenset(out)
    d = rng.randint(2, max(2, min(3, budget)))
    span = (hi - lo) // d
    if span < 2 or lo + 1 < d:
        return _build_member(rng, level - 1, sigma, lo, hi, budget)
    out = set()
    share = max(1, budget // d)
    for i in range(d):
        w_lo = lo + i * span
        w_hi = w_lo + span - 1
        out |= _build_member(rng, level - 1, sigma, w_lo, w_hi, share)
    return frozenset(out)


def certified_pair(
    rng: random.Random, level: int, max_size: int = 6, depth: int = 14
) -> tuple[frozenset[Branch], Branch]:
    """A member pair at the given finite plain level, built per the definitions."""
    sigma = random_branch(rng, 3)
    lo = max(0, rng.randint(0, 2))
    F = _build_member(rng, level, sigma, lo, lo + depth, max_size)
    return F, sigma


def random_query(
    rng: random.Random, max_size: int = 5, max_word: int = 5
) -> tuple[frozenset[Branch], Branch]:
    """A membership query with no bias toward members."""
    size = rng.randint(1, max_size)
    F: set[Branch] = set()
    while len(F) < size:
        F.add(random_branch(rng, max_word))
    sigma = random_branch(rng, max_word)
    while sigma in F:
        sigma = random_branch(rng, max_word)
    return frozenset(F), sigma


def mixed_queries(
    rng: random.Random, count: int, max_level: int = 3, max_size: int = 5
) -> list[tuple[frozenset[Branch], Branch, int]]:
    """Half constructed members, half unbiased queries; with a level each."""
    out = []
    for i in range(count):
        level = rng.randint(1, max_level)
        if i % 2 == 0:
            F, sigma = certified_pair(rng, level, max_size)
        else:
            F, sigma = random_query(rng, max_size)
        out.append((F, sigma, level))
    return out


# -- file emitters (used by the gen command) --------------------------------


def format_vector(x: Vector) -> str:
    lines = [f"{b} {v.numerator}/{v.denominator}" for b, v in x.entries]
    return "\n".join(lines) + "\n"


def parse_vector(text: str) -> Vector:
    pairs = []
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tok = s.split()
        pairs.append((Branch.parse(tok[0]), _parse_fraction(tok[1])))
    return Vector.from_pairs(pairs)


def format_seq_vector(x: SeqVector) -> str:
    lines = [f"{n} {v.numerator}/{v.denominator}" for n, v in x.entries]
    return "\n".join(lines) + "\n"


def parse_seq_vector(text: str) -> SeqVector:
    pairs = []
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tok = s.split()
        pairs.append((int(tok[0]), _parse_fraction(tok[1])))
    return SeqVector.from_pairs(pairs)


def _parse_fraction(text: str) -> Fraction:
    if "/" in text:
        p, q = text.split("/", 1)
        return Fraction(int(p), int(q))
    return Fraction(int(text))
