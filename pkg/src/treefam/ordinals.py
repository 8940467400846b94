"""Ordinals below w^w in Cantor normal form.

The recursions downstream only consume an ordinal through three questions:
zero / successor / limit, the predecessor of a successor, and the k-th
element of one fixed fundamental sequence.  A value is a finite tuple of
(exponent, coefficient) terms with strictly decreasing exponents, so
comparison is plain lexicographic order on the term list.

The fundamental-sequence convention (shared by the Schreier hierarchy and
the branch families, which must use the same sequence): peel one copy of
the last term, replace it by ``w^(e-1) * k``, and nudge by ``+1`` whenever
the raw value is itself a limit, so every approximant is a successor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

from .errors import ParseError

_TERM_RE = re.compile(r"^(?:w(?:\^(\d+))?(?:\*(\d+))?|(\d+))$")


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    """Sum of w^e * c terms, exponents strictly decreasing, coefficients >= 1."""

    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        last = None
        for e, c in self.terms:
            if e < 0 or c < 1:
                raise ValueError(f"bad CNF term w^{e}*{c}")
            if last is not None and e >= last:
                raise ValueError("CNF exponents must strictly decrease")
            last = e

    @classmethod
    def from_int(cls, n: int) -> "Ordinal":
        if n < 0:
            raise ValueError("ordinals are nonnegative")
        return cls(((0, n),)) if n else cls()

    @classmethod
    def omega(cls, exponent: int = 1, coefficient: int = 1) -> "Ordinal":
        return cls(((exponent, coefficient),))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] >= 1

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] == 0

    def natural(self) -> int | None:
        """The integer value if this ordinal is finite, else None."""
        if self.is_zero:
            return 0
        if len(self.terms) == 1 and self.terms[0][0] == 0:
            return self.terms[0][1]
        return None

    def predecessor(self) -> "Ordinal":
        if not self.is_successor:
            raise ValueError(f"{self} is not a successor ordinal")
        head, (_, c) = self.terms[:-1], self.terms[-1]
        return Ordinal(head + ((0, c - 1),) if c > 1 else head)

    def successor(self) -> "Ordinal":
        if self.is_successor:
            head, (_, c) = self.terms[:-1], self.terms[-1]
            return Ordinal(head + ((0, c + 1),))
        return Ordinal(self.terms + ((0, 1),))

    def __lt__(self, other: "Ordinal") -> bool:
        return self.terms < other.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
            elif e == 1:
                parts.append("w" if c == 1 else f"w*{c}")
            else:
                parts.append(f"w^{e}" if c == 1 else f"w^{e}*{c}")
        return "+".join(parts)

    @classmethod
    def parse(cls, text: str) -> "Ordinal":
        """Parse the ``w^E*C`` literal grammar, e.g. ``w^2*3+w*1+4``."""
        s = text.strip()
        if not s:
            raise ParseError("empty ordinal literal", text)
        if s == "0":
            return cls()
        terms = []
        pos = 0
        for chunk in s.split("+"):
            m = _TERM_RE.match(chunk)
            if not m:
                raise ParseError("bad ordinal term", text, pos)
            if m.group(3) is not None:
                terms.append((0, int(m.group(3))))
            else:
                e = int(m.group(1)) if m.group(1) is not None else 1
                c = int(m.group(2)) if m.group(2) is not None else 1
                terms.append((e, c))
            pos += len(chunk) + 1
        try:
            return cls(tuple(terms))
        except ValueError as exc:
            raise ParseError(str(exc), text) from exc


ZERO = Ordinal()
ONE = Ordinal.from_int(1)
OMEGA = Ordinal.omega()


def cnf_compare(a: Ordinal, b: Ordinal) -> int:
    """Total order on CNF ordinals: -1, 0 or 1."""
    if a.terms == b.terms:
        return 0
    return -1 if a.terms < b.terms else 1


def fundamental_step(alpha: Ordinal, k: int) -> Ordinal:
    """k-th element of the fixed fundamental sequence of a limit ordinal.

    Strictly increasing in k, every value a non-limit, supremum alpha.
    """
    if k < 1:
        raise ValueError("fundamental sequence index must be >= 1")
    if not alpha.is_limit:
        raise ValueError(f"{alpha} is not a limit ordinal")
    head, (e, c) = alpha.terms[:-1], alpha.terms[-1]
    if c > 1:
        head = head + ((e, c - 1),)
    if e == 1:
        return Ordinal(head + ((0, k),))
    # raw value ends in w^(e-1)*k, a limit: nudge to the next successor
    return Ordinal(head + ((e - 1, k), (0, 1)))
