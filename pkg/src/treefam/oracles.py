"""Independent brute-force reference implementations.

These deliberately avoid the production search strategies: the Tsirelson
oracle enumerates every admissible family of successive support subsets
directly from the implicit formula, the membership oracle quantifies
witnesses over an explicit pool of short branches, and the Schreier oracle
tries every block split.  They exist to be slow and obviously right.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .dyadic import Branch, meet_length
from .families import FamilyParams, Plain, _gate_step, _is_base, _is_limit_level, _pred, _side_ok
from .norms import SeqVector
from .ordinals import Ordinal
from .schreier import schreier_member


def naive_tsirelson(x: SeqVector, alpha: Ordinal) -> Fraction:
    """Direct evaluation of the implicit formula by exhaustive enumeration of
    successive subset families with admissible minima."""
    supp = x.support
    if not supp:
        return Fraction(0)
    vals = {p: abs(x.get(p)) for p in supp}
    memo: dict = {}

    def val(ps: tuple[int, ...]) -> Fraction:
        if ps in memo:
            return memo[ps]
        best = max(vals[p] for p in ps)

        def extend(idx: int, mins: tuple[int, ...], acc: Fraction):
            nonlocal best
            if len(mins) >= 2 and acc / 2 > best:
                best = acc / 2
            rest = ps[idx:]
            for mask in range(1, 1 << len(rest)):
                block = tuple(rest[i] for i in range(len(rest)) if mask >> i & 1)
                if block == ps:
                    continue  # a lone full block can never join a d >= 2 family
                new_mins = mins + (block[0],)
                if not schreier_member(alpha, new_mins):
                    continue
                after = idx
                while after < len(ps) and ps[after] <= block[-1]:
                    after += 1
                extend(after, new_mins, acc + val(block))

        extend(0, (), Fraction(0))
        memo[ps] = best
        return best

    return val(supp)


def branch_pool(max_word: int) -> list[Branch]:
    """All canonical branches with words up to the given length, both tails."""
    out = []
    words = [""]
    frontier = [""]
    for _ in range(max_word):
        frontier = [w + b for w in frontier for b in "01"]
        words.extend(frontier)
    seen = set()
    for w in words:
        for tail in (0, 1):
            b = Branch(w, tail)
            if b not in seen:
                seen.add(b)
                out.append(b)
    out.sort(key=lambda b: b.sort_key)
    return out


class PoolOracle:
    """Membership with inner witnesses quantified over a fixed branch pool."""

    def __init__(self, pool: Iterable[Branch]):
        self.pool = list(pool)
        self._member: dict = {}
        self._maxvarmin: dict = {}

    def member(self, params: FamilyParams, F: frozenset[Branch], sigma: Branch) -> bool:
        ml = {}
        for tau in F:
            l = meet_length(sigma, tau)
            if l is None:
                return False
            ml[tau] = l
        key = (params, F, sigma)
        if key in self._member:
            return self._member[key]
        res = self._decide(params, F, sigma, ml)
        self._member[key] = res
        return res

    def any_sigma(self, params: FamilyParams, F: frozenset[Branch]) -> bool:
        return any(s not in F and self.member(params, F, s) for s in self.pool)

    def _decide(self, params, F, sigma, ml):
        if _is_base(params):
            chain = sorted(F, key=lambda t: ml[t])
            lens = tuple(ml[t] for t in chain)
            if len(set(lens)) != len(lens) or lens[0] < 1:
                return False
            return _side_ok(params, lens)
        if _is_limit_level(params):
            return any(
                self.member(_gate_step(params, n), F, sigma)
                for n in range(1, min(ml.values()) + 1)
            )
        prev = _pred(params)
        if self.member(prev, F, sigma):
            return True
        by_len: dict[int, set[Branch]] = {}
        for tau, l in ml.items():
            by_len.setdefault(l, set()).add(tau)
        classes = [(l, frozenset(by_len[l])) for l in sorted(by_len)]
        lens = tuple(l for l, _ in classes)
        if lens[0] >= 1 and _side_ok(params, lens):
            if all(self._pool_maxvarmin(prev, C) > l for l, C in classes):
                return True
        m = len(classes)
        for cuts in _all_cuts(m):
            if len(cuts) < 2:
                continue
            firsts = tuple(classes[group[0]][0] for group in cuts)
            if not _side_ok(params, firsts):
                continue
            ok = True
            for group in cuts:
                block = frozenset().union(*(classes[i][1] for i in group))
                if not self.member(prev, block, sigma):
                    ok = False
                    break
            if ok:
                return True
        return False

    def _pool_maxvarmin(self, params, C: frozenset[Branch]) -> int:
        key = (params, C)
        if key in self._maxvarmin:
            return self._maxvarmin[key]
        best = -1
        for s in self.pool:
            if s in C:
                continue
            if self.member(params, C, s):
                lens = [meet_length(s, tau) for tau in C]
                best = max(best, min(lens))
        self._maxvarmin[key] = best
        return best


def _all_cuts(m: int):
    """All partitions of range(m) into consecutive nonempty groups."""
    for mask in range(1 << (m - 1)):
        groups = []
        current = [0]
        for i in range(1, m):
            if mask >> (i - 1) & 1:
                groups.append(current)
                current = [i]
            else:
                current.append(i)
        groups.append(current)
        yield groups


def brute_schreier_member(level: int, F: tuple[int, ...]) -> bool:
    """Finite-level Schreier membership by explicit block splitting."""
    if not F:
        return True
    if level == 0:
        return len(F) == 1
    n = len(F)
    for d in range(1, min(F[0], n) + 1):
        for cuts in combinations(range(1, n), d - 1):
            bounds = (0,) + cuts + (n,)
            blocks = [F[a:b] for a, b in zip(bounds, bounds[1:])]
            if all(brute_schreier_member(level - 1, blk) for blk in blocks):
                return True
    return False
