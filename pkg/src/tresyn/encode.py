"""Constraint atoms "value lies in interval #id" and the per-candidate problem.

For a closed template, every accepted positive must satisfy all atoms of at
least one of its derivations, and every negative must violate at least one
atom of each of its derivations.  Interval ids are level-order node positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .core import Interval, TimedWord, Tre, TreError, as_rat, cell_of, count_holes, rebuild
from .derive import Derivation, derivation_atom_sets, glushkov, label_positions, untimed_accepts

AtomT = Tuple[int, Fraction]
PathFormula = FrozenSet[AtomT]
Assignment = Dict[int, Interval]


@dataclass
class Problem:
    intervals: Tuple[int, ...]
    positive_groups: List[List[PathFormula]] = field(default_factory=list)
    negative_groups: List[List[PathFormula]] = field(default_factory=list)

    def atoms(self):
        for group in self.positive_groups + self.negative_groups:
            for formula in group:
                yield from formula


def encode_derivation(p: Tre, word: TimedWord, d: Derivation) -> PathFormula:
    return frozenset(d.atoms(label_positions(p), word))


def encode_positive(p: Tre, word: TimedWord) -> List[PathFormula]:
    formulas = derivation_atom_sets(p, word)
    if not formulas:
        raise TreError(f"the template cannot derive positive {word}")
    return formulas


def encode_negative(p: Tre, word: TimedWord, nfa=None) -> List[PathFormula]:
    nfa = nfa if nfa is not None else glushkov(p)
    if not untimed_accepts(nfa, word.events):
        return []
    return derivation_atom_sets(p, word)


def build_problem(p: Tre, positives: Iterable[TimedWord], negatives: Iterable[TimedWord]) -> Problem:
    if count_holes(p):
        raise TreError("template still has holes")
    lt = label_positions(p)
    nfa = glushkov(lt)
    problem = Problem(tuple(lt.restricted_positions()))
    for w in positives:
        problem.positive_groups.append(encode_positive(lt, w))
    for w in negatives:
        formulas = encode_negative(lt, w, nfa)
        if formulas:
            problem.negative_groups.append(formulas)
    return problem


def feasible_cells(contain: Iterable[int], exclude: Iterable[int]) -> Optional[Tuple[int, Optional[int]]]:
    """Widest cell range covering ``contain`` and avoiding ``exclude``, or None."""
    contain = set(contain)
    exclude = set(exclude)
    if not contain:
        if not exclude:
            return 0, None
        low = min(exclude)
        return (0, low - 1) if low > 0 else (max(exclude) + 1, None)
    lo, hi = min(contain), max(contain)
    if any(lo <= x <= hi for x in exclude):
        return None
    below = [x for x in exclude if x < lo]
    above = [x for x in exclude if x > hi]
    return (max(below) + 1 if below else 0), (min(above) - 1 if above else None)


def interval_feasible(must_contain: Iterable, must_exclude: Iterable) -> Tuple[bool, Optional[Interval]]:
    """Is there one integer-bounded interval holding all of one set and none of the other?"""
    found = feasible_cells(
        (cell_of(as_rat(v)) for v in must_contain),
        (cell_of(as_rat(v)) for v in must_exclude),
    )
    if found is None:
        return False, None
    return True, Interval.from_cells(*found)


def instantiate(p: Tre, assignment: Mapping[int, Interval]) -> Tre:
    """Concrete TRE: the node at position ``i`` gets ``assignment[i]``."""
    lt = label_positions(p)
    missing = [i for i in lt.restricted_positions() if i not in assignment]
    if missing:
        raise TreError(f"no interval assigned to ids {missing}")
    built: Dict[int, Tre] = {}
    for pos in reversed(lt.positions):
        node = lt.nodes[pos]
        kids = [built[c] for c in lt.kids[pos]]
        built[pos] = rebuild(node, kids, assignment.get(pos))
    return built[1]
