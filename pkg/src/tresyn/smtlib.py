"""SMT-LIB2 (QF_LIA) export of a :class:`Problem` and an external solver bridge.

Each interval ``i`` becomes integers ``l_i``, ``u_i`` and booleans ``lc_i``
(lower bound closed), ``uc_i`` (upper bound closed) and ``uinf_i`` (no upper
bound).  A rational atom value ``p/q`` is compared against ``q*l`` and ``q*u``
so everything stays integral.
"""

from __future__ import annotations

import os
import re
import shlex
import subprocess
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .core import Interval, TreError
from .encode import Problem
from .solver import SolveResult

SOLVER_ENV = "TRESYN_SOLVER"


def _atom_term(iid: int, value: Fraction) -> str:
    value = Fraction(value)
    p, q = value.numerator, value.denominator
    ql = f"l_{iid}" if q == 1 else f"(* {q} l_{iid})"
    qu = f"u_{iid}" if q == 1 else f"(* {q} u_{iid})"
    lower = f"(or (< {ql} {p}) (and lc_{iid} (= {ql} {p})))"
    upper = f"(or uinf_{iid} (< {p} {qu}) (and uc_{iid} (= {p} {qu})))"
    return f"(and {lower} {upper})"


def _conj(terms: Sequence[str]) -> str:
    if not terms:
        return "true"
    return terms[0] if len(terms) == 1 else "(and " + " ".join(terms) + ")"


def _disj(terms: Sequence[str]) -> str:
    if not terms:
        return "false"
    return terms[0] if len(terms) == 1 else "(or " + " ".join(terms) + ")"


def _formula(formula) -> str:
    return _conj([_atom_term(i, v) for i, v in sorted(formula)])


def emit_smtlib(problem: Problem) -> str:
    ids = sorted(set(problem.intervals) | {i for i, _ in problem.atoms()})
    lines = ["(set-logic QF_LIA)"]
    for i in ids:
        lines.append(f"(declare-const l_{i} Int)")
        lines.append(f"(declare-const u_{i} Int)")
        lines.append(f"(declare-const lc_{i} Bool)")
        lines.append(f"(declare-const uc_{i} Bool)")
        lines.append(f"(declare-const uinf_{i} Bool)")
    for i in ids:
        lines.append(f"(assert (>= l_{i} 0))")
        lines.append(f"(assert (=> (not uinf_{i}) (<= l_{i} u_{i})))")
        lines.append(f"(assert (=> (and (not uinf_{i}) (= l_{i} u_{i})) (and lc_{i} uc_{i})))")
    for group in problem.positive_groups:
        lines.append(f"(assert {_disj([_formula(f) for f in sorted(group, key=sorted)])})")
    for group in problem.negative_groups:
        for f in sorted(group, key=sorted):
            lines.append(f"(assert (not {_formula(f)}))")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


_SEXP_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _parse_sexp(text: str):
    stack: List[list] = [[]]
    for tok in _SEXP_TOKEN.findall(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise TreError("unbalanced solver output")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    return stack[0]


def _value(term):
    if isinstance(term, list):
        if len(term) == 2 and term[0] == "-":
            return -_value(term[1])
        raise TreError(f"unexpected model term {term}")
    if term in ("true", "false"):
        return term == "true"
    return int(term)


def parse_model(text: str) -> Dict[str, object]:
    values: Dict[str, object] = {}

    def visit(node):
        if isinstance(node, list):
            if len(node) == 5 and node[0] == "define-fun" and node[2] == []:
                values[node[1]] = _value(node[4])
            else:
                for child in node:
                    visit(child)

    visit(_parse_sexp(text))
    return values


def model_to_assignment(ids, values: Dict[str, object]) -> Dict[int, Interval]:
    out = {}
    for i in ids:
        lo = values.get(f"l_{i}", 0)
        lc = values.get(f"lc_{i}", True)
        unbounded = values.get(f"uinf_{i}", True)
        if unbounded:
            out[i] = Interval(lo, None, lc, False)
        else:
            out[i] = Interval(lo, values.get(f"u_{i}", lo), lc, values.get(f"uc_{i}", True))
    return out


def solver_command(spec: Optional[str] = None) -> Optional[List[str]]:
    """Turn ``smtlib:CMD ARGS`` (or ``$TRESYN_SOLVER``) into an argv list."""
    spec = spec if spec is not None else os.environ.get(SOLVER_ENV)
    if not spec or spec == "builtin":
        return None
    if spec.startswith("smtlib:"):
        spec = spec[len("smtlib:"):]
    argv = shlex.split(spec)
    if not argv:
        raise TreError("empty solver command")
    return argv


def solve_external(problem: Problem, command: Sequence[str], timeout: Optional[float] = None) -> SolveResult:
    script = emit_smtlib(problem)
    try:
        proc = subprocess.run(
            list(command), input=script, capture_output=True, text=True, timeout=timeout
        )
    except FileNotFoundError as exc:
        return SolveResult("error", message=f"solver not found: {exc}")
    except subprocess.TimeoutExpired:
        return SolveResult("budget", message=f"solver timed out after {timeout}s")
    lines = proc.stdout.strip().splitlines()
    verdict = lines[0].strip() if lines else ""
    if verdict == "unsat":
        return SolveResult("unsat")
    if verdict != "sat":
        detail = (proc.stderr or proc.stdout).strip()
        return SolveResult("error", message=f"solver said {verdict!r}: {detail[:200]}")
    ids = sorted(set(problem.intervals) | {i for i, _ in problem.atoms()})
    values = parse_model("\n".join(lines[1:]))
    return SolveResult("sat", model_to_assignment(ids, values))
