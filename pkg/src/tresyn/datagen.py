"""Sample timed words from a TRE and build labelled example sets.

Sampling is not uniform over the timed language.  A word is drawn in two
stages: first an untimed derivation (branch choices, geometric star counts),
then grid delays, node by node.  A restricted node either samples its
children independently and checks the total, or first picks a total inside
its restriction and splits it among the children; the two proposals
alternate.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from .core import Interval, TimedWord, Tre, TreError, alphabet_of
from .derive import ATOM, CAT, EPS, HOLE, OR, LabeledTree, label_positions, membership
from .syntax import format_tre, write_words


class SamplingError(TreError):
    pass


@dataclass(frozen=True)
class SampleLimits:
    max_word_length: int = 8
    max_star_iterations: int = 4
    delay_grid: int = 10
    max_rejection_attempts: int = 1000
    seed: int = 0
    max_delay: int = 10

    def __post_init__(self):
        for name in ("max_word_length", "max_star_iterations", "delay_grid", "max_rejection_attempts", "max_delay"):
            if getattr(self, name) <= 0:
                raise TreError(f"{name} must be positive")


# A sampled untimed derivation: (position, letters consumed, children)
Shape = Tuple[int, int, tuple]


class _Failure(Exception):
    def __init__(self, position: int):
        self.position = position


class _Sampler:
    def __init__(self, tree: LabeledTree, limits: SampleLimits, rng: random.Random):
        self.lt = tree
        self.limits = limits
        self.rng = rng
        self.den = limits.delay_grid
        self.failures: Counter = Counter()

    # untimed stage
    def shape(self, p: int) -> Shape:
        lt = self.lt
        kind = lt.kind[p]
        if kind == EPS:
            return (p, 0, ())
        if kind == ATOM:
            return (p, 1, ())
        if kind == HOLE:
            raise SamplingError("cannot sample from a template with holes")
        if kind == OR:
            child = self.shape(self.rng.choice(lt.kids[p]))
            return (p, child[1], (child,))
        if kind == CAT:
            kids = tuple(self.shape(c) for c in lt.kids[p])
            return (p, sum(k[1] for k in kids), kids)
        n = 0
        while n < self.limits.max_star_iterations and self.rng.random() < 0.5:
            n += 1
        kids = []
        for _ in range(n):
            it = self.shape(lt.kids[p][0])
            if it[1] > 0:
                kids.append(it)
        return (p, sum(k[1] for k in kids), tuple(kids))

    # timed stage
    def grid_values(self, interval: Optional[Interval], letters: int) -> Tuple[int, int]:
        """Numerator range (over ``den``) of grid totals allowed for a node."""
        den = self.den
        lo, hi = 0, self.limits.max_delay * letters * den
        if interval is not None:
            ilo = interval.lo * den + (0 if interval.lo_closed else 1)
            lo = max(lo, ilo)
            if interval.hi is not None:
                hi = min(hi, interval.hi * den - (0 if interval.hi_closed else 1))
            elif lo > hi:
                hi = lo + self.limits.max_delay * den
        return lo, hi

    def delays(self, shape: Shape, total: Optional[int] = None) -> List[int]:
        """Grid numerators for the letters under ``shape``."""
        p, letters, kids = shape
        restriction = self.lt.restriction[p]
        if letters == 0:
            if (total not in (None, 0)) or (restriction is not None and not restriction.contains(0)):
                raise _Failure(p)
            return []
        lo, hi = self.grid_values(restriction, letters)
        if lo > hi:
            raise _Failure(p)
        if total is not None:
            if restriction is not None and not restriction.contains(Fraction(total, self.den)):
                raise _Failure(p)
            return self.split(shape, total)
        if self.lt.kind[p] == ATOM:
            return [self.rng.randint(lo, hi)]
        if restriction is None:
            return [d for k in kids for d in self.delays(k)]
        if self.rng.random() < 0.5:
            out = [d for k in kids for d in self.delays(k)]
            if not restriction.contains(Fraction(sum(out), self.den)):
                raise _Failure(p)
            return out
        return self.split(shape, self.rng.randint(lo, hi))

    def split(self, shape: Shape, total: int) -> List[int]:
        p, letters, kids = shape
        if self.lt.kind[p] == ATOM:
            return [total]
        live = [k for k in kids if k[1] > 0]
        cuts = sorted(self.rng.randint(0, total) for _ in range(len(live) - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [total])]
        share = iter(parts)
        out = []
        for k in kids:
            out.extend(self.delays(k, next(share) if k[1] > 0 else 0))
        return out


def _events(shape: Shape, lt: LabeledTree, out: List[str]):
    p, _, kids = shape
    if lt.kind[p] == ATOM:
        out.append(lt.event[p])
    for k in kids:
        _events(k, lt, out)
    return out


def sample_word(target: Tre, limits: Optional[SampleLimits] = None, rng: Optional[random.Random] = None) -> TimedWord:
    """One word of ``target``'s language, checked by membership."""
    limits = limits or SampleLimits()
    rng = rng if rng is not None else random.Random(limits.seed)
    lt = label_positions(target)
    sampler = _Sampler(lt, limits, rng)
    for _ in range(limits.max_rejection_attempts):
        shape = sampler.shape(1)
        if shape[1] > limits.max_word_length:
            continue
        try:
            numerators = sampler.delays(shape)
        except _Failure as failure:
            sampler.failures[failure.position] += 1
            continue
        events = _events(shape, lt, [])
        word = TimedWord(tuple(zip(events, (Fraction(n, limits.delay_grid) for n in numerators))))
        if membership(lt, word):
            return word
    if sampler.failures:
        pos, _ = sampler.failures.most_common(1)[0]
        node = lt.nodes[pos]
        raise SamplingError(
            f"gave up after {limits.max_rejection_attempts} attempts; most often violated: "
            f"restriction {node.restriction} on {format_tre(node)}"
        )
    raise SamplingError(
        f"gave up after {limits.max_rejection_attempts} attempts; "
        f"no derivation fits within {limits.max_word_length} letters"
    )


@dataclass
class Dataset:
    positives: List[TimedWord]
    negatives: List[TimedWord]
    requested_positives: int
    requested_negatives: int

    @property
    def complete(self) -> bool:
        return (len(self.positives) == self.requested_positives
                and len(self.negatives) == self.requested_negatives)

    def report(self) -> str:
        return (f"{len(self.positives)}/{self.requested_positives} positives, "
                f"{len(self.negatives)}/{self.requested_negatives} negatives")


def _random_delay(limits: SampleLimits, rng: random.Random) -> Fraction:
    return Fraction(rng.randint(0, limits.max_delay * limits.delay_grid), limits.delay_grid)


def _edit_event(word: TimedWord, letters: Sequence[str], limits: SampleLimits,
                rng: random.Random) -> Optional[TimedWord]:
    """Substitute, delete or insert one event, keeping the other delays."""
    pairs = list(word.pairs)
    op = rng.randrange(3)
    if op == 2 or not pairs:
        if len(pairs) >= limits.max_word_length or not letters:
            return None
        pairs.insert(rng.randint(0, len(pairs)), (rng.choice(letters), _random_delay(limits, rng)))
    elif op == 1:
        if len(pairs) < 2:
            return None
        del pairs[rng.randrange(len(pairs))]
    else:
        i = rng.randrange(len(pairs))
        choices = [e for e in letters if e != pairs[i][0]]
        if not choices:
            return None
        pairs[i] = (rng.choice(choices), pairs[i][1])
    return TimedWord(tuple(pairs))


def generate_dataset(
    target: Tre,
    n_pos: int,
    n_neg: int,
    limits: Optional[SampleLimits] = None,
    rng: Optional[random.Random] = None,
    alphabet: Optional[Sequence[str]] = None,
) -> Dataset:
    """Labelled words for ``target``.

    Negatives come in equal shares from re-timing a sampled positive (all
    delays or one), from editing one event of a positive (substitute, delete
    or insert) and from random words over the alphabet.  Anything the target
    accepts is thrown away.
    """
    limits = limits or SampleLimits()
    rng = rng if rng is not None else random.Random(limits.seed)
    lt = label_positions(target)
    letters = sorted(set(alphabet) if alphabet else alphabet_of(target))
    positives: List[TimedWord] = []
    seen = set()
    attempts = 0
    budget = max(1, n_pos) * 20
    while len(positives) < n_pos and attempts < budget:
        attempts += 1
        try:
            w = sample_word(lt, limits, rng)
        except SamplingError:
            if not positives:
                raise
            continue
        if w not in seen:
            seen.add(w)
            positives.append(w)

    negatives: List[TimedWord] = []
    attempts = 0
    budget = max(1, n_neg) * 200
    while len(negatives) < n_neg and attempts < budget:
        attempts += 1
        kind = rng.randrange(3) if positives else 2
        if kind == 0:
            pairs = list(rng.choice(positives).pairs)
            if not pairs:
                continue
            if rng.random() < 0.5:
                pairs = [(e, _random_delay(limits, rng)) for e, _ in pairs]
            else:
                i = rng.randrange(len(pairs))
                pairs[i] = (pairs[i][0], _random_delay(limits, rng))
            w = TimedWord(tuple(pairs))
        elif kind == 1:
            w = _edit_event(rng.choice(positives), letters, limits, rng)
            if w is None:
                continue
        else:
            if not letters:
                break
            n = rng.randint(1, limits.max_word_length)
            w = TimedWord(tuple((rng.choice(letters), _random_delay(limits, rng)) for _ in range(n)))
        if w in seen or membership(lt, w):
            continue
        seen.add(w)
        negatives.append(w)
    return Dataset(positives, negatives, n_pos, n_neg)


def write_dataset(prefix: Union[str, Path], target: Tre, data: Dataset, limits: SampleLimits) -> List[Path]:
    prefix = str(prefix)
    pos_path, neg_path, manifest_path = Path(prefix + ".pos"), Path(prefix + ".neg"), Path(prefix + ".json")
    write_words(pos_path, data.positives)
    write_words(neg_path, data.negatives)
    manifest = {
        "target": format_tre(target),
        "seed": limits.seed,
        "limits": asdict(limits),
        "positives": len(data.positives),
        "negatives": len(data.negatives),
        "requested_positives": data.requested_positives,
        "requested_negatives": data.requested_negatives,
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return [pos_path, neg_path, manifest_path]
