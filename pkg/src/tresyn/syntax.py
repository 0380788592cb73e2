"""Text formats: ``a@1.5 b@2`` timed words and the TRE expression grammar.

Expression grammar (postfix operators bind left to right)::

    alt      := cat ('|' cat)*
    cat      := unary (['.'] unary)*
    unary    := primary post*
    post     := '*' | interval
    primary  := EVENT | 'eps' | '?' | '(' alt ')'
    interval := ('[' | '(') NAT ',' (NAT | 'inf') (']' | ')')

``?`` is a template hole.  Several intervals on one node are intersected.
"""

from __future__ import annotations

import re
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Union

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
)

_TOKEN_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)@(\S+)\Z")
_DECIMAL_RE = re.compile(r"\d+(\.\d+)?\Z|\.\d+\Z")
_FRACTION_RE = re.compile(r"\d+/\d+\Z")


class ParseError(TreError):
    pass


def parse_delay(text: str) -> Fraction:
    if _FRACTION_RE.match(text):
        num, den = text.split("/")
        if int(den) == 0:
            raise ParseError(f"zero denominator in delay {text!r}")
        return Fraction(int(num), int(den))
    if text.startswith("-"):
        raise ParseError(f"negative delay {text!r}")
    if not _DECIMAL_RE.match(text):
        raise ParseError(f"malformed delay {text!r}")
    try:
        return Fraction(Decimal(text))
    except InvalidOperation as exc:  # pragma: no cover - regex already filters
        raise ParseError(f"malformed delay {text!r}") from exc


def parse_timed_word(text: str) -> TimedWord:
    pairs = []
    for token in text.split():
        m = _TOKEN_RE.match(token)
        if not m:
            raise ParseError(f"malformed token {token!r}")
        try:
            delay = parse_delay(m.group(2))
        except ParseError as exc:
            raise ParseError(f"malformed token {token!r}: {exc}") from None
        pairs.append((m.group(1), delay))
    return TimedWord(tuple(pairs))


def format_delay(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    text = format(Decimal(value.numerator) / Decimal(value.denominator), "f")
    return text.rstrip("0").rstrip(".") if "." in text else text


def format_timed_word(word: TimedWord) -> str:
    return " ".join(f"{e}@{format_delay(t)}" for e, t in word)


def parse_word_lines(lines: Iterable[str]) -> List[TimedWord]:
    """One word per line; ``#`` lines are comments, blank lines are the empty word."""
    words = []
    for lineno, line in enumerate(lines, 1):
        stripped = line.strip()
        if stripped.startswith("#"):
            continue
        try:
            words.append(parse_timed_word(stripped))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return words


def read_words(path: Union[str, Path]) -> List[TimedWord]:
    text = Path(path).read_text(encoding="utf-8")
    return parse_word_lines(text.splitlines())


def write_words(path: Union[str, Path], words: Iterable[TimedWord]) -> None:
    body = "".join(format_timed_word(w) + "\n" for w in words)
    Path(path).write_text(body, encoding="utf-8")


# -- expressions -------------------------------------------------------------

_EXPR_TOKEN = re.compile(
    r"""\s*(?:
        (?P<interval>[\[(]\s*\d+\s*,\s*(?:\d+|inf)\s*[\])])
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<op>[()|.*?])
    )""",
    re.VERBOSE,
)
_INTERVAL_BODY = re.compile(r"([\[(])\s*(\d+)\s*,\s*(\d+|inf)\s*([\])])")


def parse_interval(text: str) -> Interval:
    m = _INTERVAL_BODY.fullmatch(text.strip())
    if not m:
        raise ParseError(f"malformed interval {text!r}")
    left, lo, hi, right = m.groups()
    if hi == "inf":
        if right == "]":
            raise ParseError(f"closed infinite bound in {text!r}")
        return Interval(int(lo), None, left == "[", False)
    try:
        return Interval(int(lo), int(hi), left == "[", right == "]")
    except TreError as exc:
        raise ParseError(str(exc)) from None


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _EXPR_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        if m.group("interval"):
            tokens.append(("interval", m.group("interval"), m.start("interval")))
        elif m.group("name"):
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def error(self, msg):
        tok = self.peek()
        where = f"at offset {tok[2]}" if tok else "at end of input"
        return ParseError(f"{msg} {where} in {self.text!r}")

    def parse(self) -> Tre:
        if not self.tokens:
            raise ParseError("empty expression")
        tree = self.alt()
        if self.peek() is not None:
            raise self.error("unexpected token")
        return tree

    def alt(self) -> Tre:
        tree = self.cat()
        while self.peek() is not None and self.peek()[:2] == ("op", "|"):
            self.take()
            tree = Or(tree, self.cat())
        return tree

    def _starts_primary(self, tok) -> bool:
        return tok is not None and (
            tok[0] == "name" or (tok[0] == "op" and tok[1] in "(?")
        )

    def cat(self) -> Tre:
        tree = self.unary()
        while True:
            tok = self.peek()
            if tok is not None and tok[:2] == ("op", "."):
                self.take()
                tree = Concat(tree, self.unary())
            elif self._starts_primary(tok):
                tree = Concat(tree, self.unary())
            else:
                return tree

    def unary(self) -> Tre:
        tree = self.primary()
        while True:
            tok = self.peek()
            if tok is None:
                return tree
            if tok[:2] == ("op", "*"):
                self.take()
                tree = Star(tree)
            elif tok[0] == "interval":
                self.take()
                interval = parse_interval(tok[1])
                if isinstance(tree, Hole):
                    raise self.error("holes cannot carry restrictions")
                current = tree.restriction
                merged = interval if current is None else current.intersect(interval)
                if merged is None:
                    raise ParseError(f"empty intersection {current} with {interval} in {self.text!r}")
                tree = tree.with_restriction(merged)
            else:
                return tree

    def primary(self) -> Tre:
        tok = self.take()
        if tok is None:
            raise self.error("expected an expression")
        kind, value, _ = tok
        if kind == "name":
            return Epsilon() if value == "eps" else Atom(value)
        if kind == "op" and value == "?":
            return Hole()
        if kind == "op" and value == "(":
            tree = self.alt()
            close = self.take()
            if close is None or close[:2] != ("op", ")"):
                self.i -= 1
                raise self.error("expected ')'")
            return tree
        self.i -= 1
        raise self.error(f"unexpected {value!r}")


def parse_tre(text: str) -> Tre:
    return _Parser(text).parse()


def _restr(node: Tre) -> str:
    return "" if node.restriction is None else str(node.restriction)


def format_tre(tre: Tre) -> str:
    """Canonical, fully parenthesised text; ``parse_tre`` inverts it exactly."""
    if isinstance(tre, (Atom, Epsilon)):
        name = "eps" if isinstance(tre, Epsilon) else tre.event
        return name if tre.restriction is None else f"({name}{_restr(tre)})"
    if isinstance(tre, Hole):
        return "?"
    if isinstance(tre, Star):
        return f"({format_tre(tre.child)}*{_restr(tre)})"
    if isinstance(tre, Concat):
        return f"({format_tre(tre.left)} {format_tre(tre.right)}){_restr(tre)}"
    if isinstance(tre, Or):
        return f"({format_tre(tre.left)} | {format_tre(tre.right)}){_restr(tre)}"
    raise TypeError(f"not a TRE node: {tre!r}")


def tre_from(value: Union[str, Tre]) -> Tre:
    return parse_tre(value) if isinstance(value, str) else value


def word_from(value: Union[str, TimedWord]) -> TimedWord:
    return parse_timed_word(value) if isinstance(value, str) else value


def _maybe_optional(value: Optional[str]):  # pragma: no cover - helper for CLI
    return None if value is None else parse_tre(value)
