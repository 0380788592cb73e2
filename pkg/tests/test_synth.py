import json
import random
import shutil
from fractions import Fraction

import pytest

from oracles import minimal_consistent, minimality_instance
from tresyn.core import Interval, TimedWord, TreError, tre_length
from tresyn.derive import label_positions, membership
from tresyn.simple import naive_length
from tresyn.synth import (
    BUDGET_EXCEEDED,
    FOUND,
    LENGTH_CAPPED,
    NO_TRE,
    SynthConfig,
    synthesize,
    verify_consistent,
    widen,
)
from tresyn.syntax import format_tre, parse_timed_word as W, parse_tre

Z3 = shutil.which("z3")


def test_single_atom_instance():
    report = synthesize([W("a@1.5")], [W("a@2.5")])
    assert report.outcome == FOUND
    assert tre_length(report.tre) == 1
    assert verify_consistent(report.tre, [W("a@1.5")], [W("a@2.5")])


def test_obscured_instance_has_no_tre():
    pos = [W("a@1.5 a@2.6 a@1.5")]
    neg = [W("a@1.2 a@2.6 a@1.5"), W("a@1.5 a@2.6 a@1.2")]
    report = synthesize(pos, neg)
    assert report.outcome == NO_TRE and report.witness == pos[0]


def test_same_word_both_sides():
    report = synthesize([W("a@1")], [W("a@1")], SynthConfig(check_solvable_first=False))
    assert report.outcome == NO_TRE


def test_recovers_point_range_target():
    rng = random.Random(0)
    target = parse_tre("a[3,7]")
    pos = [W("a@3"), W("a@7")] + [TimedWord.of(("a", Fraction(rng.randint(31, 69), 10))) for _ in range(18)]
    neg = [W("a@2.9"), W("a@7.1")] + [TimedWord.of(("a", Fraction(rng.choice([rng.randint(0, 29), rng.randint(71, 120)]), 10))) for _ in range(18)]
    assert all(membership(target, w) for w in pos) and not any(membership(target, w) for w in neg)
    report = synthesize(pos, neg)
    assert report.outcome == FOUND and tre_length(report.tre) == 1
    assert report.tre.restriction == Interval(3, 7)


def test_length_capped():
    pos, neg = [W("a@1"), W("a@1 a@1")], [W("b@1")]
    assert minimal_consistent(pos, neg, "ab", 3)[0] == 2
    report = synthesize(pos, neg, SynthConfig(max_length=1))
    assert report.outcome == LENGTH_CAPPED
    assert synthesize(pos, neg).outcome == FOUND


def test_time_limit():
    rng = random.Random(1)
    pos = [TimedWord(tuple((rng.choice("abc"), Fraction(rng.randint(0, 40), 10)) for _ in range(6))) for _ in range(8)]
    neg = [TimedWord(tuple((rng.choice("abc"), Fraction(rng.randint(0, 40), 10)) for _ in range(6))) for _ in range(8)]
    report = synthesize(pos, neg, SynthConfig(time_limit=0.0))
    assert report.outcome in (BUDGET_EXCEEDED, NO_TRE)


@pytest.mark.parametrize("seed", range(3))
def test_minimal_and_strategy_independent(seed):
    rng = random.Random(seed)
    checked = 0
    while checked < 6:
        _, pos, neg = minimality_instance(rng, min_target=2, max_target=5)
        best = minimal_consistent(pos, neg, "ab", 3)
        if best is None:
            continue
        lengths = set()
        for strategy in ("trivial", "edge", "containment"):
            report = synthesize(pos, neg, SynthConfig(strategy=strategy))
            assert report.outcome == FOUND
            assert verify_consistent(report.tre, pos, neg)
            lengths.add(tre_length(report.tre))
        assert lengths == {best[0]}
        checked += 1


def test_report_statistics_and_json():
    pos = [W("a@1 b@2"), W("a@1 b@2.5")]
    neg = [W("a@1 b@5"), W("b@1")]
    report = synthesize(pos, neg, SynthConfig(strategy="containment"))
    assert report.outcome == FOUND
    data = json.loads(report.to_json())
    assert set(data) == {"outcome", "tre", "witness", "stats", "message"}
    assert data["tre"] == format_tre(report.tre)
    for row in data["stats"]:
        assert row["pruned"] + row["surviving"] == row["generated"]
    assert [row["length"] for row in data["stats"]] == list(range(1, tre_length(report.tre) + 1))


def test_length_never_exceeds_naive():
    rng = random.Random(5)
    for _ in range(10):
        _, pos, neg = minimality_instance(rng, min_target=3, max_target=5)
        report = synthesize(pos, neg)
        if report.outcome == FOUND:
            assert tre_length(report.tre) <= naive_length(pos)


def test_empty_alphabet_cases():
    assert format_tre(synthesize([TimedWord()], []).tre) == "eps"
    tre = synthesize([], [TimedWord()]).tre
    assert not membership(tre, TimedWord())


def test_empty_word_positive_falls_back_to_naive():
    pos, neg = [TimedWord(), W("a@1")], [W("a@2")]
    report = synthesize(pos, neg)
    assert report.outcome == FOUND
    assert verify_consistent(report.tre, pos, neg)


def test_widen_keeps_consistency_and_grows():
    pos, neg = [W("a@1.5")], [W("a@4")]
    tight = parse_tre("a(1,2)")
    wide = widen(tight, pos, neg)
    assert verify_consistent(wide, pos, neg)
    assert wide.restriction.cells()[0] <= tight.restriction.cells()[0]
    assert format_tre(wide) == "(a[0,4))"
    report = synthesize(pos, neg, SynthConfig(widen=True))
    assert verify_consistent(report.tre, pos, neg)


def test_config_validation():
    with pytest.raises(TreError):
        SynthConfig(start_length=0)
    with pytest.raises(TreError):
        SynthConfig(strategy="magic")


@pytest.mark.skipif(Z3 is None, reason="no z3 binary on PATH")
def test_external_solver_same_length():
    rng = random.Random(3)
    for _ in range(4):
        _, pos, neg = minimality_instance(rng, min_target=2, max_target=4)
        ours = synthesize(pos, neg)
        theirs = synthesize(pos, neg, SynthConfig(solver=f"smtlib:{Z3} -in"))
        assert ours.outcome == theirs.outcome
        if ours.outcome == FOUND:
            assert tre_length(ours.tre) == tre_length(theirs.tre)
            assert verify_consistent(theirs.tre, pos, neg)


def test_positions_of_found_tre_carry_intervals():
    report = synthesize([W("a@1 b@1")], [W("a@1 b@3")])
    lt = label_positions(report.tre)
    assert any(r is not None for r in lt.restriction[1:])
