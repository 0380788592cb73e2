"""Parametric TRE templates and the three candidate enumeration strategies.

A template (pTRE) is an ordinary :class:`~tresyn.core.Tre` that may contain
:class:`~tresyn.core.Hole` leaves and carries no restrictions.  Every non-hole
node stands for one unknown interval, identified by the node's level-order
position (see :mod:`tresyn.derive`).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Deque, Dict, Iterable, List, Optional, Sequence, Tuple

from .core import Atom, Concat, Hole, Or, Star, TimedWord, Tre, TreError, count_holes, iter_nodes, rebuild
from .derive import glushkov, untimed_accepts
from .syntax import format_tre

DOOMED_CAPACITY = 4096


def max_instance(p: Tre) -> Tre:
    """The template with every interval set to ``[0, inf)``."""
    if count_holes(p):
        raise TreError("template still has holes")
    return rebuild(p, [max_instance(c) for c in p.children], None)


def sort_key(p: Tre) -> str:
    return format_tre(p)


@lru_cache(maxsize=None)
def _skeletons(k: int) -> Tuple[Tre, ...]:
    if k == 1:
        return (Hole(),)
    out: List[Tre] = [Star(s) for s in _skeletons(k - 1)]
    for op in (Concat, Or):
        for a in range(1, k - 1):
            for left in _skeletons(a):
                for right in _skeletons(k - 1 - a):
                    out.append(op(left, right))
    return tuple(out)


def skeletons(k: int) -> List[Tre]:
    """All templates of ``k`` nodes whose leaves are all holes."""
    if k < 1:
        raise TreError("length must be at least 1")
    return sorted(_skeletons(k), key=sort_key)


def _fill(node: Tre, letters: Sequence[str]):
    if isinstance(node, Hole):
        for e in letters:
            yield Atom(e)
        return
    kids = node.children
    if not kids:
        yield node
        return
    for combo in itertools.product(*(list(_fill(c, letters)) for c in kids)):
        yield rebuild(node, combo, None)


def fill_atoms(skeleton: Tre, alphabet: Iterable[str]) -> List[Tre]:
    """Every way to turn the holes of ``skeleton`` into alphabet atoms."""
    letters = sorted(set(alphabet))
    return sorted(_fill(skeleton, letters), key=sort_key)


def _replace_leftmost_hole(node: Tre, replacement: Tre) -> Optional[Tre]:
    if isinstance(node, Hole):
        return replacement
    kids = list(node.children)
    for i, c in enumerate(kids):
        new = _replace_leftmost_hole(c, replacement)
        if new is not None:
            kids[i] = new
            return rebuild(node, kids, node.restriction)
    return None


def children(p: Tre, alphabet: Iterable[str]) -> List[Tre]:
    """Apply each substitution rule to the leftmost hole of ``p``."""
    rules = [Atom(e) for e in sorted(set(alphabet))]
    rules += [Star(Hole()), Concat(Hole(), Hole()), Or(Hole(), Hole())]
    out = []
    for r in rules:
        new = _replace_leftmost_hole(p, r)
        if new is None:
            raise TreError("template has no hole to expand")
        out.append(new)
    return out


def _all_accept(p: Tre, positives: Iterable[TimedWord]) -> bool:
    nfa = glushkov(p)
    return all(untimed_accepts(nfa, w.events) for w in positives)


def check_acceptable(p: Tre, positives: Iterable[TimedWord]) -> bool:
    """True iff the all-``[0,inf)`` instance of the closed template accepts every positive."""
    if count_holes(p):
        raise TreError("template still has holes")
    return _all_accept(p, positives)


def over_approximation_fails(p: Tre, positives: Iterable[TimedWord]) -> bool:
    """True iff even with every hole read as ``Sigma*`` some positive is rejected."""
    return not _all_accept(p, positives)


def edge_prunable(p: Tre, positives: Iterable[TimedWord]) -> bool:
    if count_holes(p) != 1:
        raise TreError("edge templates have exactly one hole")
    return over_approximation_fails(p, positives)


def _embeds_at(node: Tre, doomed: Tre) -> bool:
    if isinstance(doomed, Hole):
        return True
    if type(node) is not type(doomed):
        return False
    if isinstance(node, Atom) and node.event != doomed.event:
        return False
    return all(_embeds_at(a, b) for a, b in zip(node.children, doomed.children))


def syntactic_contains(longer: Tre, doomed: Tre) -> bool:
    """True iff ``doomed`` occurs as a subtree of ``longer`` (its holes match anything)."""
    return any(_embeds_at(n, doomed) for n in iter_nodes(longer))


def _signature(node: Tre):
    if isinstance(node, Atom):
        return ("atom", node.event)
    return type(node).__name__


class DoomedStore:
    """Bounded FIFO of templates known to reject some positive, indexed by root shape."""

    def __init__(self, capacity: int = DOOMED_CAPACITY):
        self.capacity = capacity
        self.order: Deque[Tre] = deque()
        self.index: Dict[object, List[Tre]] = {}

    def __len__(self):
        return len(self.order)

    def add(self, p: Tre):
        if isinstance(p, Hole) or self.capacity <= 0:
            return
        if len(self.order) >= self.capacity:
            old = self.order.popleft()
            self.index[_signature(old)].remove(old)
        self.order.append(p)
        self.index.setdefault(_signature(p), []).append(p)

    def find(self, longer: Tre) -> Optional[Tre]:
        for node in iter_nodes(longer):
            for d in self.index.get(_signature(node), ()):
                if _embeds_at(node, d):
                    return d
        return None


@dataclass
class EnumerationStats:
    explored: int = 0
    edge_pruned: int = 0
    containment_pruned: int = 0
    containment_hits: int = 0
    rejected: int = 0
    surviving: int = 0

    @property
    def pruned(self) -> int:
        return self.edge_pruned + self.containment_pruned + self.rejected

    @property
    def generated(self) -> int:
        return self.pruned + self.surviving


def enumerate_trivial(
    k: int,
    positives: Iterable[TimedWord],
    alphabet: Iterable[str],
    stats: Optional[EnumerationStats] = None,
) -> List[Tre]:
    """Closed templates of length ``k`` accepted by every positive, by brute force."""
    positives = list(positives)
    letters = sorted(set(alphabet))
    stats = stats if stats is not None else EnumerationStats()
    out = []
    for skeleton in skeletons(k):
        for p in fill_atoms(skeleton, letters):
            stats.explored += 1
            if _all_accept(p, positives):
                out.append(p)
            else:
                stats.rejected += 1
    stats.surviving += len(out)
    return sorted(out, key=sort_key)


def enumerate_recursive(
    k: int,
    positives: Iterable[TimedWord],
    alphabet: Iterable[str],
    use_containment: bool = False,
    doomed: Optional[DoomedStore] = None,
    stats: Optional[EnumerationStats] = None,
    explored_log: Optional[List[Tre]] = None,
) -> List[Tre]:
    """Closed templates of length ``k`` accepted by every positive, grown step by step.

    Each step expands the leftmost hole of every frontier template.  A template
    after ``s`` steps with ``h`` holes has length ``s + h``, so the ones with
    ``s + h > k`` can never close at step ``k`` and are dropped.  One-hole
    templates whose over-approximation rejects a positive are pruned.  With
    ``use_containment`` a template embedding a pruned one is re-checked by the
    same over-approximation and pruned if it fails too.
    """
    if k < 1:
        raise TreError("length must be at least 1")
    positives = list(positives)
    letters = sorted(set(alphabet))
    stats = stats if stats is not None else EnumerationStats()
    if use_containment and doomed is None:
        doomed = DoomedStore()
    frontier: List[Tre] = [Hole()]
    closed: List[Tre] = []
    for step in range(1, k + 1):
        nxt: List[Tre] = []
        for p in frontier:
            for c in children(p, letters):
                holes = count_holes(c)
                if holes == 0:
                    if step < k:
                        continue
                    stats.explored += 1
                    if explored_log is not None:
                        explored_log.append(c)
                    if _all_accept(c, positives):
                        closed.append(c)
                    else:
                        stats.rejected += 1
                    continue
                if step + holes > k:
                    continue
                stats.explored += 1
                if explored_log is not None:
                    explored_log.append(c)
                if holes == 1:
                    if over_approximation_fails(c, positives):
                        stats.edge_pruned += 1
                        if use_containment:
                            doomed.add(c)
                        continue
                elif use_containment and len(doomed):
                    if doomed.find(c) is not None:
                        stats.containment_hits += 1
                        if over_approximation_fails(c, positives):
                            stats.containment_pruned += 1
                            doomed.add(c)
                            continue
                nxt.append(c)
        frontier = nxt
    stats.surviving += len(closed)
    return sorted(closed, key=sort_key)


STRATEGIES = ("trivial", "edge", "containment")


def enumerate_candidates(
    strategy: str,
    k: int,
    positives: Iterable[TimedWord],
    alphabet: Iterable[str],
    doomed: Optional[DoomedStore] = None,
    stats: Optional[EnumerationStats] = None,
) -> List[Tre]:
    if strategy == "trivial":
        return enumerate_trivial(k, positives, alphabet, stats)
    if strategy == "edge":
        return enumerate_recursive(k, positives, alphabet, False, None, stats)
    if strategy == "containment":
        return enumerate_recursive(k, positives, alphabet, True, doomed, stats)
    raise TreError(f"unknown strategy {strategy!r}; expected one of {', '.join(STRATEGIES)}")
