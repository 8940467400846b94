"""Computable branches of the dyadic tree and the meet operation.

A branch is an eventually-constant 0/1 sequence, stored as a finite word
plus the repeating tail bit.  Canonical form strips trailing tail bits, so
syntactic equality is branch equality.  The meet of two branches is their
longest common initial segment; it is infinite exactly when the branches
coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError


@dataclass(frozen=True)
class Node:
    """A node of the dyadic tree: a finite 0/1 word (possibly empty)."""

    word: str = ""

    def __post_init__(self):
        if self.word.strip("01"):
            raise ValueError(f"node word must be over 0/1: {self.word!r}")

    def __len__(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        return self.word or "e"

    @classmethod
    def parse(cls, text: str) -> "Node":
        s = text.strip()
        if s == "e":
            return cls("")
        if s.strip("01"):
            raise ParseError("bad node literal", text)
        return cls(s)


def is_initial(s: Node, t: Node) -> bool:
    """s is an initial segment of t (allows equality)."""
    return t.word.startswith(s.word)


def is_proper_initial(s: Node, t: Node) -> bool:
    """s is a proper initial segment of t."""
    return s.word != t.word and t.word.startswith(s.word)


@dataclass(frozen=True)
class Branch:
    """word followed by tail repeated forever; canonical form enforced."""

    word: str
    tail: int

    def __post_init__(self):
        if self.tail not in (0, 1):
            raise ValueError(f"tail bit must be 0 or 1: {self.tail!r}")
        if self.word.strip("01"):
            raise ValueError(f"branch word must be over 0/1: {self.word!r}")
        w = self.word.rstrip(str(self.tail))
        if w != self.word:
            object.__setattr__(self, "word", w)

    def bit(self, i: int) -> int:
        """i-th bit, 1-based."""
        if i < 1:
            raise ValueError("bit positions start at 1")
        if i <= len(self.word):
            return int(self.word[i - 1])
        return self.tail

    def prefix_word(self, n: int) -> str:
        """First n bits as a word."""
        if n <= len(self.word):
            return self.word[:n]
        return self.word + str(self.tail) * (n - len(self.word))

    def prefix_node(self, n: int) -> Node:
        return Node(self.prefix_word(n))

    @property
    def sort_key(self):
        return (self.word, self.tail)

    def __str__(self) -> str:
        return f"{self.word or 'e'}+{self.tail}"

    @classmethod
    def parse(cls, text: str) -> "Branch":
        s = text.strip()
        plus = s.find("+")
        if plus < 0:
            raise ParseError("branch literal needs '+<tailbit>'", text)
        w, t = s[:plus], s[plus + 1 :]
        if w == "e":
            w = ""
        if w.strip("01"):
            raise ParseError("bad branch word", text, pos=0)
        if t not in ("0", "1"):
            raise ParseError("tail bit must be 0 or 1", text, pos=plus + 1)
        return cls(w, int(t))


@dataclass(frozen=True)
class MeetResult:
    """Meet of two branches: a finite node with its length, or the common
    branch itself with infinite length."""

    node: Node | None
    length: int | None
    branch: Branch | None = None

    @property
    def is_infinite(self) -> bool:
        return self.length is None

    def initial_of(self, other: "MeetResult") -> bool:
        """Initial-segment order, treating an infinite meet as the whole branch."""
        if self.is_infinite:
            return other.is_infinite and self.branch == other.branch
        if other.is_infinite:
            return other.branch.prefix_word(len(self.node)) == self.node.word
        return is_initial(self.node, other.node)

    def proper_initial_of(self, other: "MeetResult") -> bool:
        return self.initial_of(other) and self != other

    def __str__(self) -> str:
        if self.is_infinite:
            return f"node=INFINITE len=inf"
        return f"node={self.node} len={self.length}"


def meet(a: Branch, b: Branch) -> MeetResult:
    """Longest common initial segment of two branches."""
    if a == b:
        return MeetResult(None, None, a)
    bound = max(len(a.word), len(b.word)) + 1
    for i in range(1, bound + 1):
        if a.bit(i) != b.bit(i):
            return MeetResult(a.prefix_node(i - 1), i - 1)
    raise AssertionError("distinct canonical branches must differ within the bound")


def meet_length(a: Branch, b: Branch) -> int | None:
    """|a ^ b|; None encodes infinity (equal branches)."""
    return meet(a, b).length
