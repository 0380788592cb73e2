"""Backtracking search for interval assignments satisfying a :class:`Problem`.

Atoms only ever mention one interval, and an integer-bounded interval is a
contiguous run of cells (see :func:`tresyn.core.cell_of`).  So the theory
state of an interval is the hull of cells forced inside plus the set of cells
forced outside, and it is consistent exactly when no outside cell falls in the
hull.  An atom is decided true when its cell is inside the hull, and decided
false when it is an outside cell or lies beyond one, seen from the hull.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from .core import Interval, cell_of
from .encode import Assignment, Problem, feasible_cells

DEFAULT_BUDGET = 10 ** 6

TRUE, FALSE, UNKNOWN = 1, 0, -1

CellAtom = Tuple[int, int]


@dataclass
class SolveResult:
    status: str  # sat | unsat | budget | error
    assignment: Optional[Assignment] = None
    nodes: int = 0
    message: str = ""

    @property
    def sat(self) -> bool:
        return self.status == "sat"


class _Budget(Exception):
    pass


class _State:
    __slots__ = ("lo", "hi", "out")

    def __init__(self, lo, hi, out):
        self.lo = lo
        self.hi = hi
        self.out = out

    def copy(self) -> "_State":
        return _State(list(self.lo), list(self.hi), list(self.out))

    def status(self, atom: CellAtom) -> int:
        i, c = atom
        lo = self.lo[i]
        if lo is not None and lo <= c <= self.hi[i]:
            return TRUE
        out = self.out[i]
        if c in out:
            return FALSE
        if lo is not None and out:
            hi = self.hi[i]
            if c > hi:
                if any(hi < f < c for f in out):
                    return FALSE
            elif any(c < f < lo for f in out):
                return FALSE
        return UNKNOWN

    def set_true(self, atom: CellAtom) -> bool:
        st = self.status(atom)
        if st == FALSE:
            return False
        if st == UNKNOWN:
            i, c = atom
            if self.lo[i] is None:
                self.lo[i] = self.hi[i] = c
            else:
                self.lo[i] = min(self.lo[i], c)
                self.hi[i] = max(self.hi[i], c)
        return True

    def set_false(self, atom: CellAtom) -> bool:
        st = self.status(atom)
        if st == TRUE:
            return False
        if st == UNKNOWN:
            i, c = atom
            self.out[i] = self.out[i] | {c}
        return True

    def width(self, i: int) -> int:
        return 0 if self.lo[i] is None else self.hi[i] - self.lo[i] + 1


MINIMIZE_LIMIT = 2000


def _minimal(formulas) -> List[FrozenSet[CellAtom]]:
    """Drop duplicates and, for modest sizes, every set containing another."""
    unique = sorted(set(formulas), key=lambda f: (len(f), sorted(f)))
    if len(unique) > MINIMIZE_LIMIT:
        return unique
    out: List[FrozenSet[CellAtom]] = []
    for f in unique:
        if not any(g <= f for g in out):
            out.append(f)
    return out


class _Search:
    def __init__(self, positives, negatives, size: int, budget: int):
        self.positives: List[List[FrozenSet[CellAtom]]] = positives
        self.negatives: List[FrozenSet[CellAtom]] = negatives
        self.size = size
        self.budget = budget
        self.nodes = 0

    def propagate(self, s: _State) -> bool:
        changed = True
        while changed:
            changed = False
            for clause in self.negatives:
                unknown = None
                count = 0
                done = False
                for a in clause:
                    st = s.status(a)
                    if st == FALSE:
                        done = True
                        break
                    if st == UNKNOWN:
                        count += 1
                        unknown = a
                if done:
                    continue
                if count == 0:
                    return False
                if count == 1:
                    if not s.set_false(unknown):
                        return False
                    changed = True
            for group in self.positives:
                viable = self._viable(s, group)
                if viable is None:
                    continue
                if not viable:
                    return False
                if len(viable) == 1:
                    for a in viable[0]:
                        if not s.set_true(a):
                            return False
                    changed = True
        return True

    @staticmethod
    def _viable(s: _State, group):
        """Formulas not yet falsified, or None if one already holds."""
        viable = []
        for f in group:
            all_true = True
            dead = False
            for a in f:
                st = s.status(a)
                if st == FALSE:
                    dead = True
                    break
                if st != TRUE:
                    all_true = False
            if dead:
                continue
            if all_true:
                return None
            viable.append(f)
        return viable

    def run(self, s: _State) -> Optional[_State]:
        self.nodes += 1
        if self.nodes > self.budget:
            raise _Budget
        if not self.propagate(s):
            return None
        best = None
        for group in self.positives:
            viable = self._viable(s, group)
            if viable is not None and (best is None or len(viable) < len(best)):
                best = viable
        if best is not None:
            for f in best:
                branch = s.copy()
                if all(branch.set_true(a) for a in f):
                    found = self.run(branch)
                    if found is not None:
                        return found
            return None
        clause_unknowns = None
        for clause in self.negatives:
            unknowns = []
            for a in clause:
                st = s.status(a)
                if st == FALSE:
                    unknowns = None
                    break
                if st == UNKNOWN:
                    unknowns.append(a)
            if unknowns is not None and (clause_unknowns is None or len(unknowns) < len(clause_unknowns)):
                clause_unknowns = unknowns
        if clause_unknowns is None:
            return s
        clause_unknowns.sort(key=lambda a: (s.width(a[0]), a))
        for k, a in enumerate(clause_unknowns):
            branch = s.copy()
            if all(branch.set_true(b) for b in clause_unknowns[:k]) and branch.set_false(a):
                found = self.run(branch)
                if found is not None:
                    return found
        return None


def _in_ranges(ranges: Dict[int, Tuple[int, Optional[int]]], formula) -> bool:
    for i, c in formula:
        lo, hi = ranges[i]
        if c < lo or (hi is not None and c > hi):
            return False
    return True


def solve_cells(
    ids: Sequence[int],
    positive_groups,
    negative_clauses,
    budget: int = DEFAULT_BUDGET,
    refine: Optional[Callable[[Assignment], List[FrozenSet[CellAtom]]]] = None,
) -> SolveResult:
    """Search over cell atoms ``(interval id, cell)``.

    ``refine`` receives each candidate model and returns negative clauses it
    violates; they are added and the search restarts, until it returns none.
    """
    ids = sorted(set(ids))
    index = {iid: n for n, iid in enumerate(ids)}

    def local(formula) -> FrozenSet[CellAtom]:
        return frozenset((index[i], c) for i, c in formula)

    positives = []
    for group in positive_groups:
        formulas = _minimal(local(f) for f in group)
        if not formulas:
            return SolveResult("unsat")
        positives.append(formulas)
    clauses = _minimal(local(f) for f in negative_clauses)
    known = set(clauses)
    nodes = 0
    while True:
        if any(not c for c in clauses):
            return SolveResult("unsat", nodes=nodes)
        search = _Search(positives, clauses, len(ids), budget - nodes)
        start = _State([None] * len(ids), [None] * len(ids), [frozenset()] * len(ids))
        try:
            found = search.run(start)
        except _Budget:
            return SolveResult("budget", nodes=budget, message=f"more than {budget} search nodes")
        finally:
            nodes += search.nodes
        if found is None:
            return SolveResult("unsat", nodes=nodes)
        assignment: Assignment = {}
        for iid, n in index.items():
            contain = [] if found.lo[n] is None else [found.lo[n], found.hi[n]]
            lo, hi = feasible_cells(contain, found.out[n])
            assignment[iid] = Interval.from_cells(lo, hi)
        if refine is None:
            return SolveResult("sat", assignment, nodes)
        fresh = [f for f in (local(g) for g in refine(assignment)) if f not in known]
        if not fresh:
            return SolveResult("sat", assignment, nodes)
        known.update(fresh)
        clauses = clauses + fresh


def problem_cells(problem: Problem):
    positives = [[frozenset((i, cell_of(v)) for i, v in f) for f in g] for g in problem.positive_groups]
    negatives = {frozenset((i, cell_of(v)) for i, v in f) for g in problem.negative_groups for f in g}
    return positives, sorted(negatives, key=lambda f: (len(f), sorted(f)))


def solve_builtin(problem: Problem, budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Find one interval per id so that every positive group has a satisfied
    formula and every negative formula has a violated atom.

    Large negative sides are added lazily: only clauses violated by a
    candidate model enter the search.
    """
    ids = sorted(set(problem.intervals) | {i for i, _ in problem.atoms()})
    positives, negatives = problem_cells(problem)
    if len(negatives) <= MINIMIZE_LIMIT:
        return solve_cells(ids, positives, negatives, budget)

    def refine(assignment: Assignment):
        ranges = {i: iv.cells() for i, iv in assignment.items()}
        return [f for f in negatives if _in_ranges(ranges, f)]

    return solve_cells(ids, positives, [], budget, refine)
