"""Command-line front end.

Exit codes: 0 success, 1 no TRE exists / word rejected / unsolvable,
2 input error, 3 solver, budget or sampling failure.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from typing import List, Optional

from .core import TreError
from .datagen import SampleLimits, SamplingError, generate_dataset, write_dataset
from .derive import derivations, format_derivation, label_positions, membership
from .simple import UnsolvableError, naive_solution, solvable
from .smtlib import SOLVER_ENV
from .syntax import format_timed_word, format_tre, parse_timed_word, parse_tre, read_words
from .synth import FOUND, NO_TRE, SynthConfig, synthesize

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_FAILURE = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: Optional[str]):
    if path is None:
        return []
    try:
        return read_words(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except TreError as exc:
        raise InputError(f"{path}: {exc}") from None


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def cmd_synth(args) -> int:
    positives, negatives = _read(args.pos), _read(args.neg)
    config = SynthConfig(
        strategy=args.strategy,
        start_length=args.start_len,
        max_length=args.max_len,
        solver=args.solver,
        check_solvable_first=args.check_solvable,
        solver_budget=args.budget,
        time_limit=args.time_limit,
        widen=args.widen,
    )
    report = synthesize(positives, negatives, config)
    if report.outcome == FOUND:
        print(format_tre(report.tre))
    elif report.outcome == NO_TRE:
        print(NO_TRE)
        print(format_timed_word(report.witness))
    else:
        print(report.outcome)
        print(report.message, file=sys.stderr)
    if args.json:
        print(report.to_json())
    return {FOUND: EXIT_OK, NO_TRE: EXIT_NO}.get(report.outcome, EXIT_FAILURE)


def cmd_check(args) -> int:
    tre = parse_tre(args.tre)
    word = parse_timed_word(args.word)
    lt = label_positions(tre)
    accepted = membership(lt, word)
    print("accept" if accepted else "reject")
    if args.verbose:
        sums = word.prefix_sums()
        for d in derivations(lt, word):
            broken = [
                n.position for n in d.walk()
                if lt.restriction[n.position] is not None
                and not lt.restriction[n.position].contains(sums[n.end] - sums[n.start])
            ]
            status = "ok" if not broken else "violates " + ",".join(map(str, sorted(broken)))
            print(f"{format_derivation(d)}  {status}")
    return EXIT_OK if accepted else EXIT_NO


def cmd_decide(args) -> int:
    verdict = solvable(_read(args.pos), _read(args.neg))
    print(verdict.status)
    if verdict.status == "unsolvable":
        print(format_timed_word(verdict.witness))
        return EXIT_NO
    return EXIT_OK if verdict.status == "solvable" else EXIT_FAILURE


def cmd_naive(args) -> int:
    positives = _read(args.pos)
    if not positives:
        raise InputError("the naive solution needs at least one positive example")
    try:
        tre = naive_solution(positives, _read(args.neg))
    except UnsolvableError as exc:
        if exc.witness is None:
            print("unknown")
            print(str(exc), file=sys.stderr)
            return EXIT_FAILURE
        print("unsolvable")
        print(format_timed_word(exc.witness))
        return EXIT_NO
    print(format_tre(tre))
    return EXIT_OK


def cmd_sample(args) -> int:
    target = parse_tre(args.tre)
    limits = SampleLimits(
        max_word_length=args.max_len,
        max_star_iterations=args.max_star,
        delay_grid=args.grid,
        max_rejection_attempts=args.attempts,
        seed=args.seed,
        max_delay=args.max_delay,
    )
    try:
        data = generate_dataset(target, args.n, args.neg, limits, random.Random(args.seed))
    except SamplingError as exc:
        print(f"sampling failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    paths = write_dataset(args.out, target, data, limits)
    for p in paths:
        print(p)
    if not data.complete:
        print(f"partial dataset: {data.report()}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tresyn", description="Timed regular expression synthesis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a minimal-length TRE")
    p.add_argument("--pos", required=True, help="file of positive words")
    p.add_argument("--neg", help="file of negative words")
    p.add_argument("--strategy", choices=["trivial", "edge", "containment"], default="edge")
    p.add_argument("--max-len", type=_positive_int)
    p.add_argument("--start-len", type=_positive_int, default=1)
    p.add_argument("--solver", default=os.environ.get(SOLVER_ENV) or "builtin",
                   help="builtin or smtlib:COMMAND (default from $%s)" % SOLVER_ENV)
    p.add_argument("--check-solvable", action=argparse.BooleanOptionalAction, default=True,
                   help="decide solvability before searching (default on)")
    p.add_argument("--widen", action="store_true", help="relax the found intervals as far as consistency allows")
    p.add_argument("--json", action="store_true", help="append the JSON report")
    p.add_argument("--seed", type=int, default=0, help="accepted for reproducible runs; the search is deterministic")
    p.add_argument("--budget", type=_positive_int, default=10 ** 6, help="solver search nodes per candidate")
    p.add_argument("--time-limit", type=float, help="overall seconds before giving up")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("check", help="decide membership of one word")
    p.add_argument("--tre", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--verbose", action="store_true", help="print every derivation")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("decide", help="decide whether any TRE separates the examples")
    p.add_argument("--pos", required=True)
    p.add_argument("--neg")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("naive", help="print the disjunction of simple TREs")
    p.add_argument("--pos", required=True)
    p.add_argument("--neg")
    p.set_defaults(func=cmd_naive)

    p = sub.add_parser("sample", help="sample a labelled dataset from a TRE")
    p.add_argument("--tre", required=True)
    p.add_argument("-n", type=int, required=True, help="number of positives")
    p.add_argument("--neg", type=int, default=0, help="number of negatives")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-len", type=_positive_int, default=8)
    p.add_argument("--max-star", type=_positive_int, default=4)
    p.add_argument("--grid", type=_positive_int, default=10, help="delay denominator")
    p.add_argument("--max-delay", type=_positive_int, default=10)
    p.add_argument("--attempts", type=_positive_int, default=1000)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, TreError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
