import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from tresyn.estimator import TRESynthesizer, check_labels, check_words
from tresyn.syntax import parse_timed_word

X = ["a@1.5", "a@1.8", "a@2.5", "a@0.2 a@1"]
y = [1, 1, 0, 0]


def test_fit_predict():
    est = TRESynthesizer().fit(X, y)
    assert est.predict(X).tolist() == [True, True, False, False]
    assert est.score(X, np.array(y, dtype=bool)) == 1.0
    assert est.expression() == str(est.tre_)
    assert est.report_.outcome == "found"


def test_accepts_word_objects():
    words = [parse_timed_word(x) for x in X]
    assert TRESynthesizer().fit(words, y).predict(words).tolist() == [True, True, False, False]


def test_clone_and_params():
    est = TRESynthesizer(strategy="containment", max_length=4)
    assert clone(est).get_params()["strategy"] == "containment"


def test_unfitted():
    with pytest.raises(NotFittedError):
        TRESynthesizer().predict(X)


def test_unsolvable_raises():
    with pytest.raises(ValueError, match="no_tre_exists"):
        TRESynthesizer().fit(["a@1", "a@1"], [1, 0])


def test_validation():
    with pytest.raises(TypeError):
        check_words("a@1")
    with pytest.raises(TypeError):
        check_words([3])
    with pytest.raises(ValueError):
        check_words(["a@x"])
    with pytest.raises(ValueError):
        check_labels([1, 0], 3)
    with pytest.raises(ValueError):
        check_labels([[1], [0]], 2)
