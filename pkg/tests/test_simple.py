import math
import random
from fractions import Fraction

import pytest

from oracles import brute_laminar, brute_laminar_families, in_interval
from tresyn.core import Atom, Concat, Interval, TimedWord, tre_length
from tresyn.derive import membership
from tresyn.simple import (
    enumerate_stre,
    is_laminar,
    is_obscured,
    laminar_families,
    laminar_to_stre,
    naive_length,
    naive_solution,
    sel_equal,
    solvable,
    spans,
    theta,
    tight_interval,
    UnsolvableError,
)
from tresyn.synth import verify_consistent
from tresyn.syntax import parse_timed_word as W

W1 = W("a@1.5 a@2.6 a@1.5")
W2 = W("a@1.2 a@2.6 a@1.5")
W3 = W("a@1.5 a@2.6 a@1.2")
DELAYS = [Fraction(x) for x in ("0", "0.5", "1", "1.2", "1.5", "2", "2.6")]


def _tight(total: Fraction) -> Interval:
    d = math.floor(total)
    return Interval(d, d) if total == d else Interval(d, d + 1, False, False)


def random_word(rng, n, letters="a"):
    return TimedWord(tuple((rng.choice(letters), rng.choice(DELAYS)) for _ in range(n)))


def separates_by_brute_force(word, others, family) -> bool:
    """Every same-shape other word leaves some chosen span's tight interval."""
    for o in others:
        if o.events != word.events:
            continue
        if all(in_interval(_tight(word.span_sum(j, k)), o.span_sum(j, k)) for j, k in family):
            return False
    return True


def test_tight_interval():
    assert tight_interval(Fraction(3, 2)) == Interval(1, 2, False, False)
    assert tight_interval(Fraction(3)) == Interval(3, 3)
    assert tight_interval(0) == Interval(0, 0)


def test_theta_has_one_constraint_per_span():
    w = W("a@1.2 a@2.2")
    cs = theta(w)
    assert len(cs) == 3
    got = {(c.span, c.interval) for c in cs}
    assert got == {((1, 1), Interval(1, 2, False, False)), ((2, 2), Interval(2, 3, False, False)),
                   ((1, 2), Interval(3, 4, False, False))}


def test_sel_equal_examples():
    w1, w2, w3 = W("a@1.2 a@2.2"), W("a@1.2 a@2.6"), W("a@1.5 a@2.6")
    assert sel_equal(w1, w2)
    assert not sel_equal(w1, w3)
    assert not sel_equal(w1, W("b@1.2 a@2.2"))


@pytest.mark.parametrize("n,count", [(1, 2), (2, 8), (3, 48), (4, 352)])
def test_laminar_family_counts(n, count):
    fams = list(laminar_families(n))
    assert len(fams) == len(set(fams)) == count
    if n <= 3:
        assert set(fams) == set(brute_laminar_families(n))


def test_is_laminar_matches_brute_force():
    rng = random.Random(0)
    for _ in range(300):
        fam = rng.sample(spans(4), rng.randint(0, 5))
        assert is_laminar(fam) == brute_laminar(fam)


def test_stre_accepts_own_word_and_sel_equal_words():
    rng = random.Random(1)
    for _ in range(80):
        w = random_word(rng, rng.randint(1, 3), "ab")
        twins = [v for v in (random_word(rng, len(w), "ab") for _ in range(60)) if sel_equal(v, w)]
        for family, stre in enumerate_stre(w):
            assert membership(stre, w)
            for v in twins:
                assert membership(stre, v)


def test_stre_count_bound():
    rng = random.Random(2)
    for n in range(1, 4):
        w = random_word(rng, n)
        assert len(list(enumerate_stre(w))) <= 2 ** ((n * n + n) // 2)


def test_stre_is_concatenation_of_tight_atoms():
    w = W("a@1.5 b@2 c@0.5")
    stre = laminar_to_stre(w, {(1, 2), (1, 1), (3, 3)})
    assert membership(stre, w)
    nodes = [stre]
    while nodes:
        n = nodes.pop()
        assert isinstance(n, (Atom, Concat))
        if n.restriction is not None:
            assert n.restriction.hi is not None and n.restriction.hi - n.restriction.lo <= 1
        nodes.extend(n.children)


class TestObscuration:
    def test_example(self):
        r2 = is_obscured(W1, [W2])
        assert not r2.obscured and r2.family == frozenset({(1, 2)})
        r3 = is_obscured(W1, [W3])
        assert not r3.obscured and r3.family == frozenset({(2, 3)})
        assert is_obscured(W1, [W2, W3]).obscured

    def test_witness_separates(self):
        r = is_obscured(W1, [W2])
        assert membership(r.witness, W1) and not membership(r.witness, W2)

    def test_different_shapes_never_obscure(self):
        assert not is_obscured(W1, [W("a@1.5 a@2.6"), W("b@1.5 a@2.6 a@1.5")]).obscured

    def test_empty_word(self):
        assert is_obscured(TimedWord(), [TimedWord()]).obscured
        assert not is_obscured(TimedWord(), [W("a@1")]).obscured

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_exhaustive_family_search(self, seed):
        rng = random.Random(seed)
        for _ in range(40):
            n = rng.randint(1, 3)
            w = random_word(rng, n)
            others = [random_word(rng, n) for _ in range(rng.randint(1, 4))]
            expected = not any(separates_by_brute_force(w, others, f) for f in brute_laminar_families(n))
            got = is_obscured(w, others)
            assert got.obscured == expected
            if not expected:
                assert separates_by_brute_force(w, others, got.family)
                assert membership(got.witness, w)
                assert not any(membership(got.witness, o) for o in others)

    def test_monotone_in_the_other_set(self):
        rng = random.Random(9)
        for _ in range(60):
            w = random_word(rng, 3)
            others = [random_word(rng, 3) for _ in range(4)]
            if is_obscured(w, others[:2]).obscured:
                assert is_obscured(w, others).obscured


class TestSolvable:
    def test_examples(self):
        r = solvable([W1], [W2, W3])
        assert r.status == "unsolvable" and r.witness == W1
        assert solvable([W("a@1.5")], [W("a@2.5")]).solvable
        assert solvable([], [W1]).solvable

    def test_shared_word_is_unsolvable(self):
        assert solvable([W1], [W1]).witness == W1

    def test_naive_solution_is_consistent(self):
        rng = random.Random(4)
        checked = 0
        for _ in range(60):
            pos = [random_word(rng, rng.randint(1, 3), "ab") for _ in range(3)]
            neg = [random_word(rng, rng.randint(1, 3), "ab") for _ in range(4)]
            if not solvable(pos, neg).solvable:
                with pytest.raises(UnsolvableError):
                    naive_solution(pos, neg)
                continue
            tre = naive_solution(pos, neg)
            assert verify_consistent(tre, pos, neg)
            assert tre_length(tre) == naive_length(pos)
            checked += 1
        assert checked > 20

    def test_naive_length(self):
        assert naive_length([W("a@1 b@2"), W("a@1")]) == 3 + 1 + 1
