"""Minimal-length synthesis: grow the length until some candidate template has a
consistent interval assignment."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, List, Optional, Sequence

from .core import Epsilon, Interval, Or, TimedWord, Tre, TreError, cell_of
from .derive import (
    accepting_derivation,
    accepts_all,
    cell_atom_sets,
    glushkov,
    label_positions,
    rejects_all,
    untimed_accepts,
)
from .encode import build_problem, instantiate
from .enumeration import STRATEGIES, DoomedStore, EnumerationStats, enumerate_candidates
from .simple import DEFAULT_LENGTH_CAP, DEFAULT_TIME_BUDGET, naive_length, solvable
from .smtlib import solve_external, solver_command
from .solver import DEFAULT_BUDGET, SolveResult, solve_cells
from .syntax import format_timed_word, format_tre

FOUND = "found"
NO_TRE = "no_tre_exists"
LENGTH_CAPPED = "length_capped"
BUDGET_EXCEEDED = "budget_exceeded"


@dataclass
class SynthConfig:
    strategy: str = "edge"
    start_length: int = 1
    max_length: Optional[int] = None
    solver: str = "builtin"
    check_solvable_first: bool = True
    solver_budget: int = DEFAULT_BUDGET
    time_limit: Optional[float] = None
    solver_timeout: Optional[float] = None
    alphabet: Optional[Sequence[str]] = None
    widen: bool = False
    obscuration_cap: int = DEFAULT_LENGTH_CAP
    obscuration_time: float = DEFAULT_TIME_BUDGET

    def __post_init__(self):
        if self.start_length < 1:
            raise TreError("start_length must be at least 1")
        if self.max_length is not None and self.max_length < 1:
            raise TreError("max_length must be at least 1")
        if self.strategy not in STRATEGIES:
            raise TreError(f"unknown strategy {self.strategy!r}")


@dataclass
class LengthStats:
    length: int
    generated: int = 0
    pruned: int = 0
    surviving: int = 0
    explored: int = 0
    sat_checks: int = 0
    unsat: int = 0
    budget_failures: int = 0
    elapsed_ms: float = 0.0


@dataclass
class SynthReport:
    outcome: str
    tre: Optional[Tre] = None
    witness: Optional[TimedWord] = None
    stats: List[LengthStats] = field(default_factory=list)
    message: str = ""

    @property
    def found(self) -> bool:
        return self.outcome == FOUND

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "tre": None if self.tre is None else format_tre(self.tre),
            "witness": None if self.witness is None else format_timed_word(self.witness),
            "stats": [asdict(s) for s in self.stats],
            "message": self.message,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def verify_consistent(tre: Tre, positives: Iterable[TimedWord], negatives: Iterable[TimedWord]) -> bool:
    return accepts_all(tre, positives) and rejects_all(tre, negatives)


def widen(tre: Tre, positives: Sequence[TimedWord], negatives: Sequence[TimedWord]) -> Tre:
    """Greedily relax each restriction, cell by cell, while staying consistent."""
    lt = label_positions(tre)
    current = {p: lt.restriction[p] for p in lt.positions}

    def build(assign):
        return instantiate(lt.tre, assign)

    def ok(assign):
        return verify_consistent(build(assign), positives, negatives)

    for pos in lt.restricted_positions():
        if current[pos] is None:
            continue
        trial = dict(current)
        trial[pos] = None
        if ok(trial):
            current = trial
            continue
        lo, hi = current[pos].cells()
        if hi is not None:
            trial = dict(current)
            trial[pos] = Interval.from_cells(lo, None)
            if ok(trial):
                current = trial
                hi = None
            else:
                while True:
                    trial = dict(current)
                    trial[pos] = Interval.from_cells(lo, hi + 1)
                    if not ok(trial):
                        break
                    current, hi = trial, hi + 1
        while lo > 0:
            trial = dict(current)
            trial[pos] = Interval.from_cells(lo - 1, hi)
            if not ok(trial):
                break
            current, lo = trial, lo - 1
    return build(current)


def _unique(words: Iterable[TimedWord]) -> List[TimedWord]:
    return list(dict.fromkeys(words))


def _trivial_cases(positives, negatives) -> Optional[Tre]:
    """Answers when no event occurs anywhere, so every example is the empty word."""
    if positives:
        return Epsilon()
    if negatives:
        # the empty word has duration 0, which (0,1) excludes
        return Epsilon(restriction=Interval(0, 1, False, False))
    return Epsilon()


def _or_all(trees: Sequence[Tre]) -> Tre:
    tree = trees[0]
    for t in trees[1:]:
        tree = Or(tree, t)
    return tree


def solve_template(p: Tre, positives: Sequence[TimedWord], negatives: Sequence[TimedWord],
                   budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Built-in solve of one candidate, adding negative clauses on demand.

    Positives are encoded up front.  A negative only contributes a clause when
    a candidate model accepts it, and the clause is the atom set of the
    accepting derivation.
    """
    lt = label_positions(p)
    nfa = glushkov(lt)
    live = [w for w in negatives if untimed_accepts(nfa, w.events)]
    positive_groups = [cell_atom_sets(lt, w) for w in positives]

    def refine(assignment):
        instance = label_positions(instantiate(lt, assignment))
        clauses = []
        for w in live:
            d = accepting_derivation(instance, w)
            if d is not None:
                sums = w.prefix_sums()
                clauses.append(frozenset(
                    (n.position, cell_of(sums[n.end] - sums[n.start])) for n in d.walk()
                ))
        return clauses

    return solve_cells(lt.restricted_positions(), positive_groups, [], budget, refine)


def _solve(p: Tre, positives, negatives, config: SynthConfig, command) -> SolveResult:
    if command is None:
        return solve_template(p, positives, negatives, config.solver_budget)
    return solve_external(build_problem(p, positives, negatives), command, config.solver_timeout)


def synthesize(
    positives: Iterable[TimedWord],
    negatives: Iterable[TimedWord],
    config: Optional[SynthConfig] = None,
) -> SynthReport:
    config = config or SynthConfig()
    positives = _unique(positives)
    negatives = _unique(negatives)
    command = None if config.solver == "builtin" else solver_command(config.solver)
    negative_set = set(negatives)
    for w in positives:
        if w in negative_set:
            return SynthReport(NO_TRE, witness=w, message="a word is both positive and negative")

    if config.alphabet is not None:
        alphabet = sorted(set(config.alphabet))
    else:
        alphabet = sorted({e for w in positives + negatives for e in w.events})
    if not alphabet:
        tre = _trivial_cases(positives, negatives)
        return SynthReport(FOUND, tre, message="no events occur in the examples")

    verdict = None
    if config.check_solvable_first:
        verdict = solvable(positives, negatives, config.obscuration_cap, config.obscuration_time)
        if verdict.status == "unsolvable":
            return SynthReport(
                NO_TRE, witness=verdict.witness,
                message=f"positive {format_timed_word(verdict.witness)} is obscured by the negatives",
            )

    # the naive solution has this length, so some consistent TRE is no longer
    cap = max(naive_length(positives), 1)
    last = cap if config.max_length is None else min(cap, config.max_length)
    started = time.monotonic()
    doomed = DoomedStore() if config.strategy == "containment" else None
    report = SynthReport(LENGTH_CAPPED)
    budget_hit = False

    for k in range(config.start_length, last + 1):
        t0 = time.monotonic()
        stats = LengthStats(k)
        report.stats.append(stats)
        enum_stats = EnumerationStats()
        candidates = enumerate_candidates(config.strategy, k, positives, alphabet, doomed, enum_stats)
        stats.generated = enum_stats.generated
        stats.pruned = enum_stats.pruned
        stats.surviving = enum_stats.surviving
        stats.explored = enum_stats.explored
        for p in candidates:
            if config.time_limit is not None and time.monotonic() - started > config.time_limit:
                stats.elapsed_ms = (time.monotonic() - t0) * 1000
                report.outcome = BUDGET_EXCEEDED
                report.message = f"time limit of {config.time_limit}s reached at length {k}"
                return report
            stats.sat_checks += 1
            result = _solve(p, positives, negatives, config, command)
            if result.status == "sat":
                tre = instantiate(p, result.assignment)
                if not verify_consistent(tre, positives, negatives):
                    raise AssertionError(f"solver model for {format_tre(p)} is inconsistent")
                if config.widen:
                    tre = widen(tre, positives, negatives)
                stats.elapsed_ms = (time.monotonic() - t0) * 1000
                report.outcome = FOUND
                report.tre = tre
                if budget_hit:
                    report.message = "some shorter candidates exceeded the solver budget"
                return report
            if result.status == "unsat":
                stats.unsat += 1
            elif result.status == "budget":
                stats.budget_failures += 1
                budget_hit = True
            else:
                raise TreError(f"solver failure: {result.message}")
        stats.elapsed_ms = (time.monotonic() - t0) * 1000

    if budget_hit:
        report.outcome = BUDGET_EXCEEDED
        report.message = "solver budget exceeded on some candidates"
    elif last == cap and verdict is not None and verdict.status == "solvable":
        # only reachable when the empty word is positive: templates never use eps
        report.outcome = FOUND
        report.tre = _or_all([stre for _, stre in verdict.certificates])
        report.message = "no eps-free TRE up to the naive length; returning the naive solution"
    elif config.max_length is not None and last == config.max_length and last < cap:
        report.message = f"no consistent TRE of length <= {last}"
    else:
        report.message = f"no consistent TRE up to the naive-solution length {cap}"
    return report
