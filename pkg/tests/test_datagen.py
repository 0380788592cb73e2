import random
from fractions import Fraction

import pytest

from tresyn.datagen import SampleLimits, SamplingError, generate_dataset, sample_word, write_dataset
from tresyn.derive import membership
from tresyn.syntax import parse_tre, read_words


def test_range_target():
    rng = random.Random(0)
    target = parse_tre("a[3,7]")
    for _ in range(200):
        w = sample_word(target, rng=rng)
        assert w.events == ("a",) and 3 <= w.delays[0] <= 7


def test_point_target():
    rng = random.Random(1)
    for _ in range(20):
        assert sample_word(parse_tre("a[0,0]"), rng=rng).delays == (Fraction(0),)


def test_nested_sums():
    rng = random.Random(2)
    target = parse_tre("(a[1,3] b[2,4])[5,6]")
    for _ in range(1000):
        t1, t2 = sample_word(target, rng=rng).delays
        assert 1 <= t1 <= 3 and 2 <= t2 <= 4 and 5 <= t1 + t2 <= 6


def test_star_targets_stay_within_length():
    rng = random.Random(3)
    limits = SampleLimits(max_word_length=5)
    target = parse_tre("(a b*[0,3])* c")
    for _ in range(100):
        w = sample_word(target, limits, rng)
        assert len(w) <= 5 and membership(target, w)


def test_impossible_target_names_constraint():
    with pytest.raises(SamplingError, match=r"\[2,3\)"):
        sample_word(parse_tre("(a[0,1) b[0,1))[2,3)"), SampleLimits(max_rejection_attempts=50))


def test_dataset_labels():
    target = parse_tre("a[3,7]")
    data = generate_dataset(target, 20, 20, SampleLimits(max_word_length=1), random.Random(4))
    assert data.complete
    assert all(membership(target, w) for w in data.positives)
    assert not any(membership(target, w) for w in data.negatives)
    assert all(w.events == ("a",) for w in data.negatives)
    assert len(set(data.positives)) == 20


def test_no_negatives_requested():
    data = generate_dataset(parse_tre("a b"), 5, 0, rng=random.Random(0))
    assert data.negatives == [] and len(data.positives) == 5


def test_partial_dataset_is_reported():
    data = generate_dataset(parse_tre("a[0,0]"), 5, 0, SampleLimits(delay_grid=1), random.Random(0))
    assert not data.complete
    assert data.report().startswith("1/5 positives")


def test_deterministic_files(tmp_path):
    target = parse_tre("(a | b)[1,5] (c*)[2,9]")
    limits = SampleLimits(seed=11)
    texts = []
    for run in range(2):
        data = generate_dataset(target, 15, 15, limits, random.Random(limits.seed))
        paths = write_dataset(tmp_path / f"run{run}", target, data, limits)
        texts.append([p.read_bytes() for p in paths])
        assert read_words(paths[0]) == data.positives
    assert texts[0][:2] == texts[1][:2]
