"""Synthesis of minimal-length timed regular expressions from timed words."""

from .core import (
    Atom,
    Concat,
    Epsilon,
    Hole,
    Interval,
    Or,
    Star,
    TimedWord,
    Tre,
    TreError,
    delays,
    interval_contains,
    tre_length,
    untime,
)
from .derive import (
    accepting_paths,
    derivations,
    glushkov,
    label_positions,
    membership,
    untimed_accepts,
)
from .encode import (
    Problem,
    build_problem,
    encode_derivation,
    encode_negative,
    encode_positive,
    instantiate,
    interval_feasible,
)
from .enumeration import (
    check_acceptable,
    children,
    edge_prunable,
    enumerate_recursive,
    enumerate_trivial,
    fill_atoms,
    max_instance,
    skeletons,
    syntactic_contains,
)
from .estimator import TRESynthesizer, check_labels, check_words
from .simple import (
    enumerate_stre,
    is_obscured,
    laminar_to_stre,
    naive_solution,
    sel_equal,
    solvable,
    theta,
    tight_interval,
)
from .smtlib import emit_smtlib, solve_external
from .solver import solve_builtin
from .datagen import SampleLimits, generate_dataset, sample_word
from .syntax import ParseError, format_timed_word, format_tre, parse_timed_word, parse_tre
from .synth import SynthConfig, SynthReport, synthesize, verify_consistent

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "Concat",
    "Epsilon",
    "Hole",
    "Interval",
    "Or",
    "ParseError",
    "Problem",
    "SampleLimits",
    "Star",
    "SynthConfig",
    "SynthReport",
    "TRESynthesizer",
    "TimedWord",
    "Tre",
    "TreError",
    "accepting_paths",
    "build_problem",
    "check_acceptable",
    "check_labels",
    "check_words",
    "children",
    "delays",
    "derivations",
    "edge_prunable",
    "emit_smtlib",
    "encode_derivation",
    "encode_negative",
    "encode_positive",
    "enumerate_recursive",
    "enumerate_stre",
    "enumerate_trivial",
    "fill_atoms",
    "format_timed_word",
    "format_tre",
    "generate_dataset",
    "glushkov",
    "instantiate",
    "interval_contains",
    "interval_feasible",
    "is_obscured",
    "label_positions",
    "laminar_to_stre",
    "max_instance",
    "membership",
    "naive_solution",
    "parse_timed_word",
    "parse_tre",
    "sample_word",
    "sel_equal",
    "skeletons",
    "solvable",
    "solve_builtin",
    "solve_external",
    "syntactic_contains",
    "synthesize",
    "theta",
    "tight_interval",
    "tre_length",
    "untime",
    "untimed_accepts",
    "verify_consistent",
]
