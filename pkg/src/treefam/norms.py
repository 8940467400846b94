"""Exact norm engines.

Level norms take the supremum of |F(x)| over certified branch sets inside
the support (heredity makes the restriction lossless); Tsirelson-type norms
are computed by interval dynamic programming over admissible successive
decompositions; the composite interpolation norm is surfaced only as a
certified rational enclosure, with the truncation tail bounded through the
l1 norm.  Everything is a Fraction; there is no floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .dyadic import Branch
from .errors import CapExceeded, ParseError, TreefamError
from .families import (
    Certificate,
    Engine,
    FamilyParams,
    Plain,
    Schreier,
    decide_membership_any_sigma,
)
from .ordinals import Ordinal
from .schreier import schreier_member

_ONE = Ordinal.from_int(1)


# ---------------------------------------------------------------------------
# vectors


def _as_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class Vector:
    """Finitely supported exact-rational coefficients over branch keys."""

    entries: tuple[tuple[Branch, Fraction], ...]

    @classmethod
    def from_pairs(cls, pairs) -> "Vector":
        acc: dict[Branch, Fraction] = {}
        items = pairs.items() if isinstance(pairs, dict) else pairs
        for b, v in items:
            acc[b] = acc.get(b, Fraction(0)) + _as_fraction(v)
        ordered = tuple(
            (b, acc[b]) for b in sorted(acc, key=lambda b: b.sort_key) if acc[b]
        )
        return cls(ordered)

    def get(self, b: Branch) -> Fraction:
        for key, v in self.entries:
            if key == b:
                return v
        return Fraction(0)

    @property
    def support(self) -> tuple[Branch, ...]:
        return tuple(b for b, _ in self.entries)

    def scale(self, r) -> "Vector":
        r = _as_fraction(r)
        return Vector.from_pairs((b, r * v) for b, v in self.entries)

    def ell1(self) -> Fraction:
        return sum((abs(v) for _, v in self.entries), Fraction(0))

    def sup(self) -> Fraction:
        return max((abs(v) for _, v in self.entries), default=Fraction(0))

    def __bool__(self):
        return bool(self.entries)


def vector_sum(weighted: Iterable[tuple[Fraction, Vector]]) -> Vector:
    pairs = []
    for w, x in weighted:
        w = _as_fraction(w)
        pairs.extend((b, w * v) for b, v in x.entries)
    return Vector.from_pairs(pairs)


@dataclass(frozen=True)
class SeqVector:
    """Finitely supported rational coefficients over positive naturals."""

    entries: tuple[tuple[int, Fraction], ...]

    @classmethod
    def from_pairs(cls, pairs) -> "SeqVector":
        acc: dict[int, Fraction] = {}
        items = pairs.items() if isinstance(pairs, dict) else pairs
        for n, v in items:
            if n < 1:
                raise ValueError("sequence coordinates start at 1")
            acc[n] = acc.get(n, Fraction(0)) + _as_fraction(v)
        return cls(tuple((n, acc[n]) for n in sorted(acc) if acc[n]))

    def get(self, n: int) -> Fraction:
        for key, v in self.entries:
            if key == n:
                return v
        return Fraction(0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.entries)

    def ell1(self) -> Fraction:
        return sum((abs(v) for _, v in self.entries), Fraction(0))

    def sup(self) -> Fraction:
        return max((abs(v) for _, v in self.entries), default=Fraction(0))


# ---------------------------------------------------------------------------
# level ladders


@dataclass(frozen=True)
class PlainLadder:
    def params(self, n: int) -> FamilyParams:
        return Plain(Ordinal.from_int(n))

    def __str__(self):
        return "plain"


@dataclass(frozen=True)
class SchreierLadder:
    alpha: Ordinal

    def params(self, n: int) -> FamilyParams:
        return Schreier(self.alpha, n)

    def __str__(self):
        return f"schreier:{self.alpha}"


Ladder = Union[PlainLadder, SchreierLadder]


def parse_ladder(text: str) -> Ladder:
    parts = text.strip().split(":")
    if parts == ["plain"]:
        return PlainLadder()
    if parts[0] == "schreier" and len(parts) == 2:
        return SchreierLadder(Ordinal.parse(parts[1]))
    raise ParseError("ladder literal is plain or schreier:<ordinal>", text)


# ---------------------------------------------------------------------------
# level norms


def functional_apply(F: Iterable[Branch], x: Vector) -> Fraction:
    """Sum of the coefficients of x over F; missing keys contribute zero."""
    fs = set(F)
    return sum((v for b, v in x.entries if b in fs), Fraction(0))


def _norm_xn_full(
    x: Vector, params: FamilyParams, cap: int, engine: Engine | None
):
    """(value, achieving set, witness sigma, certificate); empty set for zero."""
    if len(x.support) > cap:
        raise CapExceeded(f"support {len(x.support)} exceeds cap {cap}")
    best = (Fraction(0), frozenset(), None, None)
    for sign in (1, -1):
        side = [b for b, v in x.entries if (v > 0) == (sign > 0)]
        side.sort(key=lambda b: b.sort_key)

        def grow(chosen: frozenset, start: int, total: Fraction):
            nonlocal best
            for i in range(start, len(side)):
                cand = chosen | {side[i]}
                got = decide_membership_any_sigma(params, cand, cap=cap, engine=engine)
                if got is None:
                    continue  # heredity: no superset can be a member either
                val = total + abs(x.get(side[i]))
                if val > best[0]:
                    best = (val, cand, got[0], got[1])
                grow(cand, i + 1, val)

        grow(frozenset(), 0, Fraction(0))
    return best


def norm_xn(
    x: Vector, params: FamilyParams, cap: int = 12, engine: Engine | None = None
) -> tuple[Fraction, frozenset[Branch]]:
    """Exact supremum of |F(x)| over the family, with an achieving set."""
    val, F, _, _ = _norm_xn_full(x, params, cap, engine)
    return val, F


# ---------------------------------------------------------------------------
# Tsirelson-type norms


@dataclass(frozen=True)
class Point:
    """Witness leaf: a single coordinate."""

    position: int

    def evaluate(self, x: SeqVector) -> Fraction:
        return abs(x.get(self.position))


@dataclass(frozen=True)
class Split:
    """Witness node: one half times the sum of the children."""

    children: tuple["TsirelsonWitness", ...]

    def evaluate(self, x: SeqVector) -> Fraction:
        return sum((c.evaluate(x) for c in self.children), Fraction(0)) / 2


@dataclass(frozen=True)
class Zero:
    def evaluate(self, x: SeqVector) -> Fraction:
        return Fraction(0)


TsirelsonWitness = Union[Point, Split, Zero]


def norm_tsirelson(
    x: SeqVector, alpha: Ordinal, cap: int = 24
) -> tuple[Fraction, TsirelsonWitness]:
    """Exact Tsirelson-type norm: max of the sup norm and half-sums over
    successive decompositions whose minima form an admissible Schreier set."""
    if alpha.is_zero:
        raise TreefamError("Tsirelson order starts at 1")
    pos = x.support
    if len(pos) > cap:
        raise CapExceeded(f"support {len(pos)} exceeds cap {cap}")
    if not pos:
        return Fraction(0), Zero()
    vals = {p: abs(x.get(p)) for p in pos}
    memo: dict = {}
    plain = alpha == _ONE

    def T(i: int, j: int) -> tuple[Fraction, TsirelsonWitness]:
        key = (i, j)
        if key in memo:
            return memo[key]
        best_p = max(range(i, j + 1), key=lambda t: (vals[pos[t]], -t))
        best = (vals[pos[best_p]], Point(pos[best_p]))
        for t in range(i, j + 1):
            got = _best_split_plain(t, j) if plain else _best_split_general(t, j)
            if got is not None and got[0] / 2 > best[0]:
                best = (got[0] / 2, Split(got[1]))
        memo[key] = best
        return best

    def _best_split_plain(t: int, j: int):
        dmax = min(pos[t], j - t + 1)
        best = None
        for d in range(2, dmax + 1):
            got = _exact_chunks(t, j, d)
            if got is not None and (best is None or got[0] > best[0]):
                best = got
        return best

    chunk_memo: dict = {}

    def _exact_chunks(t: int, j: int, d: int):
        key = (t, j, d)
        if key in chunk_memo:
            return chunk_memo[key]
        if d == 1:
            v, w = T(t, j)
            res = (v, (w,))
        else:
            res = None
            for e in range(t, j - d + 2):
                head_v, head_w = T(t, e)
                tail = _exact_chunks(e + 1, j, d - 1)
                if tail is not None:
                    cand = (head_v + tail[0], (head_w,) + tail[1])
                    if res is None or cand[0] > res[0]:
                        res = cand
        chunk_memo[key] = res
        return res

    def _best_split_general(t: int, j: int):
        best = None

        def rec(last: int, pvals: tuple[int, ...], acc_v, acc_w):
            nonlocal best
            if not schreier_member(alpha, pvals):
                return
            if len(pvals) >= 2:
                v, w = T(last, j)
                cand = (acc_v + v, acc_w + (w,))
                if best is None or cand[0] > best[0]:
                    best = cand
            for q in range(last + 1, j + 1):
                v, w = T(last, q - 1)
                rec(q, pvals + (pos[q],), acc_v + v, acc_w + (w,))

        rec(t, (pos[t],), Fraction(0), ())
        return best

    return T(0, len(pos) - 1)


# ---------------------------------------------------------------------------
# enclosures


@dataclass(frozen=True)
class NormEnclosure:
    """Certified interval around an infinitary norm; the witness re-evaluates
    exactly to the lower bound."""

    lower: Fraction
    upper: Fraction
    witness: object

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("enclosure bounds out of order")

    def width(self) -> Fraction:
        return self.upper - self.lower

    def __str__(self):
        return f"lower={_fmt(self.lower)} upper={_fmt(self.upper)}"


def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class LambdaWitness:
    trunc: int
    tree: TsirelsonWitness

    def evaluate(self) -> Fraction:
        x = SeqVector.from_pairs({n: Fraction(1, 2**n) for n in range(1, self.trunc + 1)})
        return self.tree.evaluate(x)


def lambda_constant(N: int) -> NormEnclosure:
    """Enclosure of the interpolation constant: the Tsirelson norm of the
    geometric basis sum, truncated at N with l1 tail bound 2^-N."""
    if N < 1:
        raise ValueError("truncation depth must be >= 1")
    x = SeqVector.from_pairs({n: Fraction(1, 2**n) for n in range(1, N + 1)})
    val, tree = norm_tsirelson(x, _ONE, cap=max(24, N))
    return NormEnclosure(val, val + Fraction(1, 2**N), LambdaWitness(N, tree))


@dataclass(frozen=True)
class CompositeWitness:
    """Per-level achieving families plus the Tsirelson tree over the levels."""

    families: tuple[tuple[int, frozenset[Branch]], ...]
    tree: TsirelsonWitness

    def evaluate(self, x: Vector) -> Fraction:
        seq = SeqVector.from_pairs(
            {n: abs(functional_apply(F, x)) / 2**n for n, F in self.families}
        )
        return self.tree.evaluate(seq)


def norm_composite(
    x: Vector,
    ladder: Ladder,
    t_alpha: Ordinal,
    N: int,
    cap: int = 12,
    engine: Engine | None = None,
) -> NormEnclosure:
    """Certified enclosure of the interpolated norm at truncation depth N."""
    if N < 1:
        raise ValueError("truncation depth must be >= 1")
    levels = []
    for n in range(1, N + 1):
        val, F, _, _ = _norm_xn_full(x, ladder.params(n), cap, engine)
        levels.append((n, val, F))
    seq = SeqVector.from_pairs({n: v / 2**n for n, v, _ in levels})
    lower, tree = norm_tsirelson(seq, t_alpha, cap=max(24, N))
    upper = lower + x.ell1() / 2**N
    witness = CompositeWitness(tuple((n, F) for n, _, F in levels), tree)
    return NormEnclosure(lower, upper, witness)


def pn_value(
    x: Vector, n: int, ladder: Ladder, cap: int = 12, engine: Engine | None = None
) -> Fraction:
    """Norm of the level-n projection: 2^-n times the level norm."""
    val, _ = norm_xn(x, ladder.params(n), cap=cap, engine=engine)
    return val / 2**n
