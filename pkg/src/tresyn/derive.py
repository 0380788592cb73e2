"""Position labels, Glushkov automata, accepting paths and derivations.

Positions number the syntax tree level by level (root = 1, children left to
right), so for ``(a | a b) b*`` the numbering is ``. 1, | 2, * 3, a 4, . 5,
b 6, a 7, b 8``.  Depth counts from 1 at the root.

A derivation assigns a half-open segment ``[i, j)`` of word indices to every
node occurrence.  Star nodes list their iterations, each consuming at least
one letter; a star over an empty segment has no iterations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .core import (
    Atom,
    Concat,
    Epsilon,
    Hole,
    Interval,
    Or,
    Star,
    TimedWord,
    Tre,
    cell_of,
    interval_contains,
)

EPS, ATOM, HOLE, CAT, OR, STAR = range(6)

_KIND = {Epsilon: EPS, Atom: ATOM, Hole: HOLE, Concat: CAT, Or: OR, Star: STAR}


class LabeledTree:
    """A tree with level-order positions; per-position data lives in flat lists."""

    def __init__(self, tre: Tre):
        order = [tre]
        depth = [1]
        kids: List[Tuple[int, ...]] = []
        i = 0
        while i < len(order):
            node = order[i]
            ch = []
            for c in node.children:
                order.append(c)
                depth.append(depth[i] + 1)
                ch.append(len(order))
            kids.append(tuple(ch))
            i += 1
        self.tre = tre
        # index 0 is unused so that lists are indexed by position directly
        self.nodes: List[Optional[Tre]] = [None] + order
        self.depth: List[int] = [0] + depth
        self.kids: List[Tuple[int, ...]] = [()] + kids
        self.kind: List[int] = [-1] + [_KIND[type(n)] for n in order]
        self.event: List[Optional[str]] = [None] + [
            n.event if isinstance(n, Atom) else None for n in order
        ]
        self.restriction: List[Optional[Interval]] = [None] + [n.restriction for n in order]

    def __len__(self):
        return len(self.nodes) - 1

    @property
    def positions(self) -> range:
        return range(1, len(self.nodes))

    def restricted_positions(self) -> List[int]:
        """Positions that carry an interval: every node except holes."""
        return [p for p in self.positions if self.kind[p] != HOLE]


def label_positions(tre: Tre) -> LabeledTree:
    return tre if isinstance(tre, LabeledTree) else LabeledTree(tre)


# -- Glushkov automaton ------------------------------------------------------


@dataclass(frozen=True)
class GlushkovNfa:
    """Position automaton.  State 0 is initial; other states are leaf positions.

    ``labels[q]`` is the event read when entering ``q`` or ``None`` for a hole,
    which reads any event.
    """

    states: Tuple[int, ...]
    labels: Dict[int, Optional[str]]
    successors: Dict[int, Tuple[int, ...]]
    accepting: FrozenSet[int]
    depth: Dict[int, int]

    def reads(self, q: int, event: str) -> bool:
        label = self.labels[q]
        return label is None or label == event

    def transitions(self) -> List[Tuple[int, Optional[str], int]]:
        return [(s, self.labels[q], q) for s in self.states for q in self.successors[s]]


def glushkov(tree) -> GlushkovNfa:
    lt = label_positions(tree)
    follow: Dict[int, set] = {}

    def visit(p: int):
        """Return (nullable, first, last) for the subtree at ``p``."""
        kind = lt.kind[p]
        if kind == EPS:
            return True, frozenset(), frozenset()
        if kind == ATOM:
            follow.setdefault(p, set())
            return False, frozenset([p]), frozenset([p])
        if kind == HOLE:
            # Sigma*: may be skipped, may loop on itself
            follow.setdefault(p, set()).add(p)
            return True, frozenset([p]), frozenset([p])
        if kind == STAR:
            _, first, last = visit(lt.kids[p][0])
            for q in last:
                follow[q].update(first)
            return True, first, last
        ln, lf, ll = visit(lt.kids[p][0])
        rn, rf, rl = visit(lt.kids[p][1])
        if kind == OR:
            return ln or rn, lf | rf, ll | rl
        for q in ll:
            follow[q].update(rf)
        first = lf | rf if ln else lf
        last = ll | rl if rn else rl
        return ln and rn, first, last

    nullable, first, last = visit(1)
    leaves = sorted(follow)
    succ = {0: tuple(sorted(first))}
    for q in leaves:
        succ[q] = tuple(sorted(follow[q]))
    accepting = set(last)
    if nullable:
        accepting.add(0)
    return GlushkovNfa(
        states=(0,) + tuple(leaves),
        labels={q: lt.event[q] for q in leaves} | {0: None},
        successors=succ,
        accepting=frozenset(accepting),
        depth={q: lt.depth[q] for q in leaves} | {0: 0},
    )


def untimed_accepts(nfa: GlushkovNfa, events: Sequence[str]) -> bool:
    current = {0}
    for e in events:
        current = {q for s in current for q in nfa.successors[s] if nfa.reads(q, e)}
        if not current:
            return False
    return bool(current & nfa.accepting)


def accepting_paths(nfa: GlushkovNfa, events: Sequence[str]) -> List[List[Tuple[int, int]]]:
    """All accepting runs as ``(position, depth)`` lists, in lexicographic position order."""
    n = len(events)
    live = [set() for _ in range(n + 1)]
    live[n] = set(nfa.accepting)
    for i in range(n - 1, -1, -1):
        live[i] = {
            s for s in nfa.states
            if any(nfa.reads(q, events[i]) and q in live[i + 1] for q in nfa.successors[s])
        }
    if 0 not in live[0]:
        return []
    paths: List[List[Tuple[int, int]]] = []
    run: List[int] = []

    def walk(state: int, i: int):
        if i == n:
            paths.append([(q, nfa.depth[q]) for q in run])
            return
        for q in nfa.successors[state]:
            if nfa.reads(q, events[i]) and q in live[i + 1]:
                run.append(q)
                walk(q, i + 1)
                run.pop()

    walk(0, 0)
    return paths


# -- derivations -------------------------------------------------------------


@dataclass(frozen=True)
class Derivation:
    position: int
    start: int
    end: int
    children: Tuple["Derivation", ...] = ()

    def walk(self) -> Iterator["Derivation"]:
        stack = [self]
        while stack:
            d = stack.pop()
            yield d
            stack.extend(reversed(d.children))

    def path(self, tree) -> List[Tuple[int, int]]:
        """Leaf sequence as ``(position, depth)``; a hole repeats once per letter."""
        lt = label_positions(tree)
        out = []
        for d in self.walk():
            kind = lt.kind[d.position]
            if kind == ATOM:
                out.append((d.position, lt.depth[d.position]))
            elif kind == HOLE:
                out.extend([(d.position, lt.depth[d.position])] * (d.end - d.start))
        return out

    def atoms(self, tree, word: TimedWord) -> List[Tuple[int, Fraction]]:
        """``(position, segment delay sum)`` for every restricted node occurrence."""
        lt = label_positions(tree)
        sums = word.prefix_sums()
        return [
            (d.position, sums[d.end] - sums[d.start])
            for d in self.walk()
            if lt.kind[d.position] != HOLE
        ]


class _Deriver:
    def __init__(self, lt: LabeledTree, events: Sequence[str]):
        self.lt = lt
        self.events = events
        self.memo: Dict[Tuple[int, int, int], List[Derivation]] = {}
        self.iter_memo: Dict[Tuple[int, int, int], List[Tuple[Derivation, ...]]] = {}

    def run(self, p: int, i: int, j: int) -> List[Derivation]:
        key = (p, i, j)
        found = self.memo.get(key)
        if found is None:
            found = self.memo[key] = self._compute(p, i, j)
        return found

    def _compute(self, p, i, j):
        lt = self.lt
        kind = lt.kind[p]
        if kind == EPS:
            return [Derivation(p, i, j)] if i == j else []
        if kind == ATOM:
            ok = j == i + 1 and self.events[i] == lt.event[p]
            return [Derivation(p, i, j)] if ok else []
        if kind == HOLE:
            return [Derivation(p, i, j)]
        if kind == OR:
            return [Derivation(p, i, j, (d,)) for c in lt.kids[p] for d in self.run(c, i, j)]
        if kind == CAT:
            left, right = lt.kids[p]
            out = []
            for m in range(i, j + 1):
                lefts = self.run(left, i, m)
                if not lefts:
                    continue
                rights = self.run(right, m, j)
                out.extend(Derivation(p, i, j, (a, b)) for a in lefts for b in rights)
            return out
        if i == j:
            return [Derivation(p, i, j)]
        return [Derivation(p, i, j, its) for its in self.iterations(lt.kids[p][0], i, j)]

    def iterations(self, c: int, i: int, j: int) -> List[Tuple[Derivation, ...]]:
        if i == j:
            return [()]
        key = (c, i, j)
        found = self.iter_memo.get(key)
        if found is None:
            found = []
            for m in range(i + 1, j + 1):
                heads = self.run(c, i, m)
                if heads:
                    tails = self.iterations(c, m, j)
                    found.extend((h,) + t for h in heads for t in tails)
            self.iter_memo[key] = found
        return found


def derivations(tree, word) -> List[Derivation]:
    lt = label_positions(tree)
    events = word.events if isinstance(word, TimedWord) else tuple(word)
    return _Deriver(lt, events).run(1, 0, len(events))


class _AtomSets(_Deriver):
    """Like ``_Deriver`` but keeps only the deduplicated atom set of each derivation.

    ``key`` maps a segment sum to the value recorded in the atom.
    """

    def __init__(self, lt: LabeledTree, word: TimedWord, key=None):
        super().__init__(lt, word.events)
        self.sums = word.prefix_sums()
        self.key = key

    def _compute(self, p, i, j):
        lt = self.lt
        kind = lt.kind[p]
        if kind == HOLE:
            return {frozenset()}
        total = self.sums[j] - self.sums[i]
        own = frozenset([(p, total if self.key is None else self.key(total))])
        if kind == EPS:
            return {own} if i == j else set()
        if kind == ATOM:
            ok = j == i + 1 and self.events[i] == lt.event[p]
            return {own} if ok else set()
        if kind == OR:
            return {own | s for c in lt.kids[p] for s in self.run(c, i, j)}
        if kind == CAT:
            left, right = lt.kids[p]
            out = set()
            for m in range(i, j + 1):
                lefts = self.run(left, i, m)
                if lefts:
                    rights = self.run(right, m, j)
                    out.update(own | a | b for a in lefts for b in rights)
            return out
        return {own | s for s in self.iterations(lt.kids[p][0], i, j)}

    def iterations(self, c, i, j):
        if i == j:
            return {frozenset()}
        key = (c, i, j)
        found = self.iter_memo.get(key)
        if found is None:
            found = set()
            for m in range(i + 1, j + 1):
                heads = self.run(c, i, m)
                if heads:
                    tails = self.iterations(c, m, j)
                    found.update(h | t for h in heads for t in tails)
            self.iter_memo[key] = found
        return found


def derivation_atom_sets(tree, word: TimedWord) -> List[FrozenSet[Tuple[int, Fraction]]]:
    """Distinct atom sets over all derivations of ``word``, in a stable order."""
    lt = label_positions(tree)
    found = _AtomSets(lt, word).run(1, 0, len(word))
    return sorted(found, key=lambda s: sorted(s))


def cell_atom_sets(tree, word: TimedWord) -> List[FrozenSet[Tuple[int, int]]]:
    """Distinct ``(position, cell)`` sets over all derivations of ``word``."""
    lt = label_positions(tree)
    return list(_AtomSets(lt, word, cell_of).run(1, 0, len(word)))


def format_derivation(d: Derivation) -> str:
    head = f"{d.position}[{d.start},{d.end})"
    if not d.children:
        return head
    return head + "(" + " ".join(format_derivation(c) for c in d.children) + ")"


# -- membership --------------------------------------------------------------


class _Matcher:
    def __init__(self, lt: LabeledTree, word: TimedWord):
        self.lt = lt
        self.events = word.events
        self.sums = word.prefix_sums()
        self.memo: Dict[Tuple[int, int, int], bool] = {}
        self.star_memo: Dict[Tuple[int, int, int], bool] = {}

    def match(self, p: int, i: int, j: int) -> bool:
        key = (p, i, j)
        found = self.memo.get(key)
        if found is None:
            found = self.memo[key] = self._compute(p, i, j)
        return found

    def _compute(self, p, i, j):
        lt = self.lt
        restriction = lt.restriction[p]
        if restriction is not None and not restriction.contains(self.sums[j] - self.sums[i]):
            return False
        kind = lt.kind[p]
        if kind == EPS:
            return i == j
        if kind == ATOM:
            return j == i + 1 and self.events[i] == lt.event[p]
        if kind == HOLE:
            return True
        if kind == OR:
            return any(self.match(c, i, j) for c in lt.kids[p])
        if kind == CAT:
            left, right = lt.kids[p]
            return any(self.match(left, i, m) and self.match(right, m, j) for m in range(i, j + 1))
        return self.star(lt.kids[p][0], i, j)

    def star(self, c, i, j):
        if i == j:
            return True
        key = (c, i, j)
        found = self.star_memo.get(key)
        if found is None:
            found = any(
                self.match(c, i, m) and self.star(c, m, j) for m in range(i + 1, j + 1)
            )
            self.star_memo[key] = found
        return found


def accepting_derivation(tree, word: TimedWord) -> Optional[Derivation]:
    """One derivation respecting every restriction, or None if ``word`` is rejected."""
    lt = label_positions(tree)
    m = _Matcher(lt, word)

    def build(p, i, j) -> Derivation:
        kind = lt.kind[p]
        if kind == OR:
            c = next(c for c in lt.kids[p] if m.match(c, i, j))
            return Derivation(p, i, j, (build(c, i, j),))
        if kind == CAT:
            left, right = lt.kids[p]
            k = next(k for k in range(i, j + 1) if m.match(left, i, k) and m.match(right, k, j))
            return Derivation(p, i, j, (build(left, i, k), build(right, k, j)))
        if kind == STAR:
            c = lt.kids[p][0]
            its = []
            at = i
            while at < j:
                k = next(k for k in range(at + 1, j + 1) if m.match(c, at, k) and m.star(c, k, j))
                its.append(build(c, at, k))
                at = k
            return Derivation(p, i, j, tuple(its))
        return Derivation(p, i, j)

    if not m.match(1, 0, len(word)):
        return None
    return build(1, 0, len(word))


def derivation_satisfied(tree, word: TimedWord, d: Derivation) -> bool:
    lt = label_positions(tree)
    return all(
        interval_contains(lt.restriction[p], value) for p, value in d.atoms(lt, word)
    )


def membership(tre, word: TimedWord, return_witnesses: bool = False):
    """Decide ``word in [[tre]]``.

    With ``return_witnesses`` the answer is ``(accepted, derivations)`` where the
    derivations are exactly those whose every node respects its restriction.
    """
    lt = label_positions(tre)
    if return_witnesses:
        witnesses = [d for d in derivations(lt, word) if derivation_satisfied(lt, word, d)]
        return bool(witnesses), witnesses
    return _Matcher(lt, word).match(1, 0, len(word))


def accepts_all(tre, words) -> bool:
    lt = label_positions(tre)
    return all(_Matcher(lt, w).match(1, 0, len(w)) for w in words)


def rejects_all(tre, words) -> bool:
    lt = label_positions(tre)
    return not any(_Matcher(lt, w).match(1, 0, len(w)) for w in words)
