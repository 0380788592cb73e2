"""Timed words, integer-bounded intervals and the TRE syntax tree."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Tuple, Union

EVENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

Number = Union[int, Fraction, str]


class TreError(ValueError):
    """Raised for malformed words, intervals or expressions."""


def as_rat(value: Number) -> Fraction:
    if isinstance(value, float):
        # go through the decimal repr so 1.5 stays 3/2 and 0.1 stays 1/10
        value = repr(value)
    return Fraction(value)


def cell_of(value: Fraction) -> int:
    """Index of the unit cell holding ``value``.

    Cells alternate between points and open unit intervals: ``[0,0]`` is 0,
    ``(0,1)`` is 1, ``[1,1]`` is 2, and so on.
    """
    d = math.floor(value)
    return 2 * d + (0 if value == d else 1)


def cell_interval(cell: int) -> "Interval":
    d, odd = divmod(cell, 2)
    if odd:
        return Interval(d, d + 1, lo_closed=False, hi_closed=False)
    return Interval(d, d)


@dataclass(frozen=True)
class Interval:
    """Integer-bounded interval; ``hi=None`` stands for an open infinite top."""

    lo: int
    hi: Optional[int]
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.hi is None and self.hi_closed:
            object.__setattr__(self, "hi_closed", False)
        if self.lo < 0:
            raise TreError(f"negative lower bound in {self}")
        if self.hi is not None:
            if self.hi < self.lo:
                raise TreError(f"empty interval: lower bound above upper in {self}")
            if self.hi == self.lo and not (self.lo_closed and self.hi_closed):
                raise TreError(f"empty interval {self}")

    @classmethod
    def universal(cls) -> "Interval":
        return cls(0, None)

    @classmethod
    def from_cells(cls, lo: int, hi: Optional[int]) -> "Interval":
        """The interval covering exactly cells ``lo..hi`` (``hi=None``: unbounded)."""
        if hi is not None and hi < lo:
            raise TreError("empty cell range")
        lo_closed = lo % 2 == 0
        if hi is None:
            return cls(lo // 2, None, lo_closed, False)
        return cls(lo // 2, (hi + 1) // 2, lo_closed, hi % 2 == 0)

    def cells(self) -> Tuple[int, Optional[int]]:
        lo = 2 * self.lo + (0 if self.lo_closed else 1)
        if self.hi is None:
            return lo, None
        return lo, 2 * self.hi - (0 if self.hi_closed else 1)

    @property
    def is_universal(self) -> bool:
        return self.lo == 0 and self.lo_closed and self.hi is None

    def contains(self, t: Number) -> bool:
        t = as_rat(t)
        if t < self.lo or (t == self.lo and not self.lo_closed):
            return False
        if self.hi is None:
            return True
        return t < self.hi or (t == self.hi and self.hi_closed)

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo_a, hi_a = self.cells()
        lo_b, hi_b = other.cells()
        lo = max(lo_a, lo_b)
        if hi_a is None:
            hi = hi_b
        elif hi_b is None:
            hi = hi_a
        else:
            hi = min(hi_a, hi_b)
        if hi is not None and hi < lo:
            return None
        return Interval.from_cells(lo, hi)

    def __str__(self):
        left = "[" if self.lo_closed else "("
        if self.hi is None:
            return f"{left}{self.lo},inf)"
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo},{self.hi}{right}"


def interval_contains(interval: Optional[Interval], t: Number) -> bool:
    if interval is None:
        return as_rat(t) >= 0
    return interval.contains(t)


@dataclass(frozen=True)
class TimedWord:
    """A finite sequence of ``(event, delay)`` pairs; the delay precedes its event."""

    pairs: Tuple[Tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        pairs = []
        for event, delay in self.pairs:
            if not EVENT_RE.match(event):
                raise TreError(f"bad event name {event!r}")
            delay = as_rat(delay)
            if delay < 0:
                raise TreError(f"negative delay {delay} for event {event}")
            pairs.append((event, delay))
        object.__setattr__(self, "pairs", tuple(pairs))

    @classmethod
    def of(cls, *pairs) -> "TimedWord":
        return cls(tuple(pairs))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self) -> Iterator[Tuple[str, Fraction]]:
        return iter(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    @property
    def events(self) -> Tuple[str, ...]:
        return tuple(e for e, _ in self.pairs)

    @property
    def delays(self) -> Tuple[Fraction, ...]:
        return tuple(t for _, t in self.pairs)

    def prefix_sums(self) -> Tuple[Fraction, ...]:
        sums = [Fraction(0)]
        for _, t in self.pairs:
            sums.append(sums[-1] + t)
        return tuple(sums)

    def span_sum(self, j: int, k: int) -> Fraction:
        """Sum of delays ``j..k`` (1-based, inclusive)."""
        return sum(self.delays[j - 1:k], Fraction(0))

    def __str__(self):
        from .syntax import format_timed_word

        return format_timed_word(self)


def untime(word: TimedWord) -> Tuple[str, ...]:
    return word.events


def delays(word: TimedWord) -> Tuple[Fraction, ...]:
    return word.delays


# -- syntax tree -------------------------------------------------------------


@dataclass(frozen=True)
class Tre:
    """Base node.  ``restriction=None`` means ``[0, inf)``."""

    restriction: Optional[Interval] = field(default=None, kw_only=True)

    def __post_init__(self):
        if self.restriction is not None and self.restriction.is_universal:
            object.__setattr__(self, "restriction", None)

    @property
    def children(self) -> Tuple["Tre", ...]:
        return ()

    def with_restriction(self, restriction: Optional[Interval]) -> "Tre":
        return _replace(self, restriction=restriction)

    def __str__(self):
        from .syntax import format_tre

        return format_tre(self)


@dataclass(frozen=True)
class Epsilon(Tre):
    pass


@dataclass(frozen=True)
class Atom(Tre):
    event: str

    def __post_init__(self):
        super().__post_init__()
        if not EVENT_RE.match(self.event):
            raise TreError(f"bad event name {self.event!r}")


@dataclass(frozen=True)
class Hole(Tre):
    """Placeholder in a template; never carries a concrete restriction."""


@dataclass(frozen=True)
class Concat(Tre):
    left: Tre
    right: Tre

    @property
    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Tre):
    left: Tre
    right: Tre

    @property
    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Star(Tre):
    child: Tre

    @property
    def children(self):
        return (self.child,)


def _replace(node: Tre, **changes) -> Tre:
    from dataclasses import replace

    return replace(node, **changes)


def rebuild(node: Tre, children: Sequence[Tre], restriction: Optional[Interval]) -> Tre:
    """Copy of ``node`` with new children and restriction."""
    if isinstance(node, (Concat, Or)):
        return type(node)(children[0], children[1], restriction=restriction)
    if isinstance(node, Star):
        return Star(children[0], restriction=restriction)
    return node.with_restriction(restriction)


def iter_nodes(tre: Tre) -> Iterator[Tre]:
    """Preorder traversal."""
    stack = [tre]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def tre_length(tre: Tre) -> int:
    return sum(1 for _ in iter_nodes(tre))


def count_holes(tre: Tre) -> int:
    return sum(1 for n in iter_nodes(tre) if isinstance(n, Hole))


def is_closed(tre: Tre) -> bool:
    return count_holes(tre) == 0


def alphabet_of(tre: Tre) -> frozenset:
    return frozenset(n.event for n in iter_nodes(tre) if isinstance(n, Atom))


def strip_restrictions(tre: Tre) -> Tre:
    """The untimed shape of ``tre``: same tree, every restriction dropped."""
    return rebuild(tre, [strip_restrictions(c) for c in tre.children], None)
