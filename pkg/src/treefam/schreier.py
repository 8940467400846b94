"""The Schreier hierarchy S_alpha on the positive naturals.

Recursion: S_0 is the empty set plus singletons; S_{b+1} collects unions of
at most min F successive nonempty S_b blocks; at a limit, membership is
gated through the fixed fundamental sequence by ``min F >= k``.  The empty
set belongs to every level.  Convolution S_alpha^n uses unordered unions of
at most n members.

All operations are pure; the memo tables are an invisible speedup.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable

from .errors import CapExceeded
from .ordinals import Ordinal, fundamental_step

_ONE = Ordinal.from_int(1)

_member_cache: dict = {}
_convolve_cache: dict = {}


def clear_caches() -> None:
    _member_cache.clear()
    _convolve_cache.clear()


def _as_finset(elements: Iterable[int]) -> tuple[int, ...]:
    F = tuple(sorted(set(elements)))
    if F and F[0] < 1:
        raise ValueError("Schreier sets live on positive naturals")
    return F


def schreier_member(alpha: Ordinal, elements: Iterable[int]) -> bool:
    """F in S_alpha."""
    return _member(alpha, _as_finset(elements))


def _member(alpha: Ordinal, F: tuple[int, ...]) -> bool:
    if not F:
        return True
    if alpha.is_zero:
        return len(F) == 1
    if alpha == _ONE:
        return len(F) <= F[0]
    key = (alpha.terms, F)
    hit = _member_cache.get(key)
    if hit is not None:
        return hit
    if alpha.is_limit:
        res = any(
            _member(fundamental_step(alpha, k), F) for k in range(1, F[0] + 1)
        )
    else:
        beta = alpha.predecessor()
        # reachable[i] = block counts that can tile the prefix F[:i]
        n = len(F)
        reachable = [set() for _ in range(n + 1)]
        reachable[0].add(0)
        for i in range(n):
            if not reachable[i]:
                continue
            for j in range(i + 1, n + 1):
                if _member(beta, F[i:j]):
                    reachable[j].update(c + 1 for c in reachable[i])
        res = any(c <= F[0] for c in reachable[n])
    _member_cache[key] = res
    return res


def schreier_convolve_member(alpha: Ordinal, n: int, elements: Iterable[int]) -> bool:
    """F is a union of at most n members of S_alpha (unions unordered)."""
    if n < 1:
        raise ValueError("convolution depth must be >= 1")
    return _convolve(alpha, n, _as_finset(elements))


def _convolve(alpha: Ordinal, n: int, F: tuple[int, ...]) -> bool:
    if not F:
        return True
    if _member(alpha, F):
        return True
    if n == 1:
        return False
    key = (alpha.terms, n, F)
    hit = _convolve_cache.get(key)
    if hit is not None:
        return hit
    # the part containing min F can be normalized to contain it; heredity
    # lets parts be assumed disjoint
    head, rest = F[0], F[1:]
    res = False
    for r in range(len(rest) + 1):
        for picked in combinations(rest, r):
            part = (head,) + picked
            if _member(alpha, part):
                remainder = tuple(x for x in rest if x not in picked)
                if _convolve(alpha, n - 1, remainder):
                    res = True
                    break
        if res:
            break
    _convolve_cache[key] = res
    return res


def schreier_enumerate(
    alpha: Ordinal, universe: Iterable[int], cap: int = 20
) -> list[tuple[int, ...]]:
    """All subsets of the universe in S_alpha, ordered by size then lex."""
    U = _as_finset(universe)
    if len(U) > cap:
        raise CapExceeded(f"universe of {len(U)} exceeds enumeration cap {cap}")
    out: list[tuple[int, ...]] = []
    for size in range(len(U) + 1):
        for F in combinations(U, size):
            if _member(alpha, F):
                out.append(F)
    return out


def schreier_convolve_enumerate(
    alpha: Ordinal, n: int, universe: Iterable[int], cap: int = 20
) -> list[tuple[int, ...]]:
    """All subsets of the universe in S_alpha^n, ordered by size then lex."""
    U = _as_finset(universe)
    if len(U) > cap:
        raise CapExceeded(f"universe of {len(U)} exceeds enumeration cap {cap}")
    out: list[tuple[int, ...]] = []
    for size in range(len(U) + 1):
        for F in combinations(U, size):
            if _convolve(alpha, n, F):
                out.append(F)
    return out
