"""scikit-learn style classifier around :func:`tresyn.synth.synthesize`."""

from __future__ import annotations

from typing import List, Tuple

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .core import TimedWord, TreError
from .derive import label_positions, membership
from .syntax import format_tre, parse_timed_word
from .synth import FOUND, SynthConfig, synthesize


def check_words(X) -> List[TimedWord]:
    """Coerce a sequence of :class:`TimedWord` or ``a@1.5 b@2`` strings."""
    if isinstance(X, (str, TimedWord)):
        raise TypeError("expected a sequence of timed words, got a single word")
    words = []
    for i, x in enumerate(X):
        if isinstance(x, TimedWord):
            words.append(x)
        elif isinstance(x, str):
            try:
                words.append(parse_timed_word(x))
            except TreError as exc:
                raise ValueError(f"sample {i}: {exc}") from None
        else:
            raise TypeError(f"sample {i}: expected TimedWord or str, got {type(x).__name__}")
    return words


def check_labels(y, n: int) -> np.ndarray:
    labels = np.asarray(y)
    if labels.ndim != 1:
        raise ValueError(f"labels must be one-dimensional, got shape {labels.shape}")
    if len(labels) != n:
        raise ValueError(f"{n} samples but {len(labels)} labels")
    return labels.astype(bool)


def split_examples(X, y) -> Tuple[List[TimedWord], List[TimedWord]]:
    words = check_words(X)
    labels = check_labels(y, len(words))
    positives = [w for w, keep in zip(words, labels) if keep]
    negatives = [w for w, keep in zip(words, labels) if not keep]
    return positives, negatives


class TRESynthesizer(BaseEstimator, ClassifierMixin):
    """Learns a shortest timed regular expression separating the two classes.

    ``y`` is truthy for positive examples.  After ``fit``, ``tre_`` holds the
    expression and ``report_`` the full synthesis report.
    """

    def __init__(self, strategy="edge", max_length=None, solver="builtin",
                 check_solvable_first=True, widen=False, time_limit=None):
        self.strategy = strategy
        self.max_length = max_length
        self.solver = solver
        self.check_solvable_first = check_solvable_first
        self.widen = widen
        self.time_limit = time_limit

    def fit(self, X, y):
        positives, negatives = split_examples(X, y)
        config = SynthConfig(
            strategy=self.strategy,
            max_length=self.max_length,
            solver=self.solver,
            check_solvable_first=self.check_solvable_first,
            widen=self.widen,
            time_limit=self.time_limit,
        )
        self.report_ = synthesize(positives, negatives, config)
        if self.report_.outcome != FOUND:
            raise ValueError(f"synthesis failed ({self.report_.outcome}): {self.report_.message}")
        self.tre_ = self.report_.tre
        self.classes_ = np.array([False, True])
        return self

    def _check_fitted(self):
        if not hasattr(self, "tre_"):
            raise NotFittedError("call fit before predict")

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        lt = label_positions(self.tre_)
        return np.array([membership(lt, w) for w in check_words(X)], dtype=bool)

    def expression(self) -> str:
        self._check_fitted()
        return format_tre(self.tre_)
