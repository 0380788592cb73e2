"""Tight span constraints, simple TREs and the obscuration decision.

A simple TRE over a word is a concatenation tree of the word's letters whose
restricted nodes carry unit-width intervals ``(d,d+1)`` or points ``[d,d]``.
Which spans it constrains is all that matters semantically, and the spans a
single tree can constrain are exactly the laminar families (any two spans
nested or disjoint).  The search below therefore works on span families.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

from .core import Atom, Concat, Epsilon, Interval, Or, TimedWord, Tre, TreError, as_rat, cell_interval, cell_of

Span = Tuple[int, int]

DEFAULT_LENGTH_CAP = 12
DEFAULT_TIME_BUDGET = 10.0


class UnsolvableError(TreError):
    """No TRE separates the examples; ``witness`` is an obscured positive."""

    def __init__(self, message: str, witness: Optional[TimedWord] = None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class TightConstraint:
    span: Span
    interval: Interval


def tight_interval(total) -> Interval:
    total = as_rat(total)
    if total < 0:
        raise TreError(f"negative sum {total}")
    return cell_interval(cell_of(total))


def spans(n: int) -> List[Span]:
    return [(j, k) for j in range(1, n + 1) for k in range(j, n + 1)]


def span_cells(word: TimedWord) -> Dict[Span, int]:
    sums = word.prefix_sums()
    return {(j, k): cell_of(sums[k] - sums[j - 1]) for j, k in spans(len(word))}


def theta(word: TimedWord) -> List[TightConstraint]:
    """One tight constraint per span ``(j, k)``, ordered by ``(j, k)``."""
    if len(word) == 0:
        raise TreError("tight constraints are undefined for the empty word")
    return [TightConstraint(s, cell_interval(c)) for s, c in span_cells(word).items()]


def sel_equal(w1: TimedWord, w2: TimedWord) -> bool:
    """True iff no TRE with integer bounds can tell the two words apart."""
    return w1.events == w2.events and span_cells(w1) == span_cells(w2)


def compatible(a: Span, b: Span) -> bool:
    (j1, k1), (j2, k2) = a, b
    return k1 < j2 or k2 < j1 or (j1 <= j2 and k2 <= k1) or (j2 <= j1 and k1 <= k2)


def is_laminar(family: Iterable[Span]) -> bool:
    items = list(family)
    return all(compatible(a, b) for i, a in enumerate(items) for b in items[i + 1:])


def laminar_families(n: int) -> Iterator[FrozenSet[Span]]:
    """Every laminar subset of the spans of a length-``n`` word, each once."""
    all_spans = spans(n)
    chosen: List[Span] = []

    def rec(i: int):
        if i == len(all_spans):
            yield frozenset(chosen)
            return
        yield from rec(i + 1)
        s = all_spans[i]
        if all(compatible(s, c) for c in chosen):
            chosen.append(s)
            yield from rec(i + 1)
            chosen.pop()

    yield from rec(0)


def laminar_to_stre(word: TimedWord, family: Iterable[Span]) -> Tre:
    """Concatenation tree over ``word`` whose family spans carry tight intervals.

    Gaps between family spans are filled with left-leaning concatenation.
    """
    fam = set(family)
    n = len(word)
    if n == 0:
        if fam:
            raise TreError("the empty word has no spans")
        return Epsilon()
    for j, k in fam:
        if not 1 <= j <= k <= n:
            raise TreError(f"span {(j, k)} out of range for a word of length {n}")
    if not is_laminar(fam):
        raise TreError("span family is not laminar")
    cells = span_cells(word)

    def restricted(span: Span, node: Tre) -> Tre:
        if span in fam:
            return node.with_restriction(cell_interval(cells[span]))
        return node

    def build(j: int, k: int) -> Tre:
        if j == k:
            return restricted((j, k), Atom(word[j - 1][0]))
        inner = [s for s in fam if j <= s[0] and s[1] <= k and s != (j, k)]
        maximal = sorted(
            s for s in inner
            if not any(o != s and o[0] <= s[0] and s[1] <= o[1] for o in inner)
        )
        pieces: List[Tre] = []
        i = j
        for a, b in maximal:
            pieces.extend(Atom(word[x - 1][0]) for x in range(i, a))
            pieces.append(build(a, b))
            i = b + 1
        pieces.extend(Atom(word[x - 1][0]) for x in range(i, k + 1))
        tree = pieces[0]
        for piece in pieces[1:]:
            tree = Concat(tree, piece)
        return restricted((j, k), tree)

    return build(1, n)


def enumerate_stre(word: TimedWord) -> Iterator[Tuple[FrozenSet[Span], Tre]]:
    if len(word) == 0:
        raise TreError("simple TREs are undefined for the empty word")
    for family in laminar_families(len(word)):
        yield family, laminar_to_stre(word, family)


# -- obscuration -------------------------------------------------------------


@dataclass(frozen=True)
class ObscurationResult:
    """``status`` is ``obscured``, ``separable`` or ``unknown`` (budget ran out)."""

    status: str
    family: Optional[FrozenSet[Span]] = None
    witness: Optional[Tre] = None
    blocker: Optional[TimedWord] = None

    @property
    def obscured(self) -> Optional[bool]:
        return None if self.status == "unknown" else self.status == "obscured"


class _Timeout(Exception):
    pass


def _hitting_laminar(sets: List[FrozenSet[Span]], deadline: Optional[float]) -> Optional[List[Span]]:
    """A laminar span list meeting every set, or None."""
    sets = sorted(set(sets), key=len)
    reduced: List[FrozenSet[Span]] = []
    for s in sets:
        if not any(r <= s for r in reduced):
            reduced.append(s)
    chosen: List[Span] = []
    calls = 0

    def rec(remaining: List[FrozenSet[Span]]) -> bool:
        nonlocal calls
        calls += 1
        if deadline is not None and calls % 256 == 0 and time.monotonic() > deadline:
            raise _Timeout
        open_sets = [s for s in remaining if not any(c in s for c in chosen)]
        if not open_sets:
            return True
        best = None
        for s in open_sets:
            options = [x for x in s if all(compatible(x, c) for c in chosen)]
            if best is None or len(options) < len(best):
                best = options
                if not options:
                    return False
        for x in sorted(best):
            chosen.append(x)
            if rec(open_sets):
                return True
            chosen.pop()
        return False

    return list(chosen) if rec(reduced) else None


def is_obscured(
    word: TimedWord,
    others: Iterable[TimedWord],
    length_cap: int = DEFAULT_LENGTH_CAP,
    time_budget: float = DEFAULT_TIME_BUDGET,
) -> ObscurationResult:
    """Decide whether every simple TRE of ``word`` also accepts one of ``others``.

    Words longer than ``length_cap`` are searched under ``time_budget`` seconds
    and may come back ``unknown``.
    """
    if len(word) == 0:
        if any(len(o) == 0 for o in others):
            return ObscurationResult("obscured", blocker=TimedWord())
        return ObscurationResult("separable", frozenset(), Epsilon())
    mine = span_cells(word)
    distinguishing: List[FrozenSet[Span]] = []
    for other in others:
        if other.events != word.events:
            continue
        theirs = span_cells(other)
        diff = frozenset(s for s in mine if mine[s] != theirs[s])
        if not diff:
            return ObscurationResult("obscured", blocker=other)
        distinguishing.append(diff)
    deadline = None if len(word) <= length_cap else time.monotonic() + time_budget
    try:
        found = _hitting_laminar(distinguishing, deadline)
    except _Timeout:
        return ObscurationResult("unknown")
    if found is None:
        return ObscurationResult("obscured")
    family = frozenset(found)
    return ObscurationResult("separable", family, laminar_to_stre(word, family))


@dataclass(frozen=True)
class Solvability:
    """``status`` is ``solvable``, ``unsolvable`` or ``unknown``."""

    status: str
    witness: Optional[TimedWord] = None
    certificates: Tuple[Tuple[TimedWord, Tre], ...] = ()

    @property
    def solvable(self) -> Optional[bool]:
        return None if self.status == "unknown" else self.status == "solvable"


def _unique(words: Iterable[TimedWord]) -> List[TimedWord]:
    return list(dict.fromkeys(words))


def solvable(
    positives: Iterable[TimedWord],
    negatives: Iterable[TimedWord],
    length_cap: int = DEFAULT_LENGTH_CAP,
    time_budget: float = DEFAULT_TIME_BUDGET,
) -> Solvability:
    """Some TRE separates the sets iff no positive is obscured by the negatives."""
    positives = _unique(positives)
    negatives = _unique(negatives)
    negative_set = set(negatives)
    for w in positives:
        if w in negative_set:
            return Solvability("unsolvable", w)
    certificates = []
    unknown = False
    for w in positives:
        result = is_obscured(w, negatives, length_cap, time_budget)
        if result.status == "obscured":
            return Solvability("unsolvable", w)
        if result.status == "unknown":
            unknown = True
        else:
            certificates.append((w, result.witness))
    if unknown:
        return Solvability("unknown", certificates=tuple(certificates))
    return Solvability("solvable", certificates=tuple(certificates))


def naive_length(positives: Iterable[TimedWord]) -> int:
    """Length of the naive solution; independent of which spans get restricted."""
    positives = _unique(positives)
    if not positives:
        return 0
    return sum(max(1, 2 * len(w) - 1) for w in positives) + len(positives) - 1


def naive_solution(
    positives: Iterable[TimedWord],
    negatives: Iterable[TimedWord],
    length_cap: int = DEFAULT_LENGTH_CAP,
    time_budget: float = DEFAULT_TIME_BUDGET,
) -> Tre:
    """Disjunction of one separating simple TRE per positive."""
    positives = _unique(positives)
    if not positives:
        raise TreError("the naive solution needs at least one positive example")
    result = solvable(positives, negatives, length_cap, time_budget)
    if result.status == "unsolvable":
        raise UnsolvableError(f"positive {result.witness} is obscured by the negatives", result.witness)
    if result.status == "unknown":
        raise UnsolvableError("obscuration search ran out of time")
    trees = [stre for _, stre in result.certificates]
    tree = trees[0]
    for t in trees[1:]:
        tree = Or(tree, t)
    return tree
