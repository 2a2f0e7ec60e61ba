"""
Sequences over a countable alphabet

Letters, words, the computable fragment of the full shift (finite words and
eventually periodic infinite words), the shift map, concatenation, subblocks
and the quotient map from truncated elements of the compactified product space.

Text form:
    ~                  the empty sequence
    a1.a2.a3           a finite word
    a1.a2|(a3.a1)      a1 a2 followed by (a3 a1) repeated forever
    (a2.a1)            purely periodic
Letters are ``a<k>`` symbols, graph ids such as ``e`` or ``h3r``, or
higher-block letters ``<e.f>``.
"""

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Union

from .errors import OutOfRange, ParseError


@dataclass(frozen=True)
class Symbol:
    """The symbol a_index of the countable alphabet"""
    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"symbol index must be positive, got {self.index}")

    def __str__(self) -> str:
        return f"a{self.index}"


@dataclass(frozen=True)
class Block:
    """A word used as a single letter of a higher block alphabet"""
    letters: tuple["Letter", ...]

    def __str__(self) -> str:
        return "<" + ".".join(format_letter(a) for a in self.letters) + ">"

    def __len__(self) -> int:
        return len(self.letters)


Letter = Union[Symbol, str, Block]
Word = tuple  # tuple[Letter, ...]; the empty tuple is the empty sequence

EMPTY_WORD: Word = ()
INFINITE_LENGTH = math.inf


def letter_key(letter: Letter) -> tuple[Any, ...]:
    """Total order on letters: symbols by index, then graph ids, then blocks."""
    if isinstance(letter, Symbol):
        return (0, letter.index)
    if isinstance(letter, str):
        return (1, letter)
    return (2, tuple(letter_key(a) for a in letter.letters))


def word_key(word: Word) -> tuple[Any, ...]:
    return (len(word), tuple(letter_key(a) for a in word))


def symbols(*indices: int) -> Word:
    """Shorthand: symbols(1, 2) == (a1, a2)."""
    return tuple(Symbol(i) for i in indices)


# -------------------------------
# Canonical eventually periodic form
# -------------------------------

def _primitive_root(period: Word) -> Word:
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period[:d] * (n // d) == period:
            return period[:d]
    return period


def canonical_form(pre: Word, per: Word) -> tuple[Word, Word]:
    """Minimal period, then minimal preperiod for that period."""
    per = _primitive_root(per)
    while pre and pre[-1] == per[-1]:
        pre = pre[:-1]
        per = per[-1:] + per[:-1]
    return pre, per


@dataclass(frozen=True)
class Seq:
    """
    An element of the computable fragment of the full shift.

    ``per`` empty means the finite word ``pre``; otherwise the sequence is
    pre·per·per·… and is stored canonically so that ``==`` agrees with
    equality of the denoted sequences.
    """
    pre: Word = EMPTY_WORD
    per: Word = EMPTY_WORD

    def __post_init__(self) -> None:
        pre, per = tuple(self.pre), tuple(self.per)
        if per:
            pre, per = canonical_form(pre, per)
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "per", per)

    @classmethod
    def finite(cls, word: Word) -> "Seq":
        return cls(tuple(word), EMPTY_WORD)

    @classmethod
    def periodic(cls, pre: Word, per: Word) -> "Seq":
        if not per:
            raise ValueError("period must be nonempty")
        return cls(tuple(pre), tuple(per))

    @property
    def is_finite(self) -> bool:
        return not self.per

    @property
    def is_empty(self) -> bool:
        return not self.pre and not self.per

    @property
    def length(self) -> float:
        return len(self.pre) if self.is_finite else INFINITE_LENGTH

    def letter(self, i: int) -> Letter:
        """The 1-based entry x_i."""
        if i < 1 or i > self.length:
            raise OutOfRange(f"position {i} outside sequence of length {self.length}")
        if i <= len(self.pre):
            return self.pre[i - 1]
        return self.per[(i - 1 - len(self.pre)) % len(self.per)]

    def prefix(self, n: int) -> Word:
        """The first min(n, l(x)) entries."""
        n = int(min(n, self.length))
        return tuple(self.letter(i) for i in range(1, n + 1))

    def letters(self) -> frozenset:
        return frozenset(self.pre) | frozenset(self.per)

    def __str__(self) -> str:
        return format_seq(self)


EMPTY_SEQ = Seq()


# -------------------------------
# Operations
# -------------------------------

def shift(x: Seq) -> Seq:
    """σ: drop the first entry; sequences of length at most one go to the empty sequence."""
    if x.is_finite:
        return Seq.finite(x.pre[1:])
    if x.pre:
        return Seq.periodic(x.pre[1:], x.per)
    return Seq.periodic(EMPTY_WORD, x.per[1:] + x.per[:1])


def shift_by(x: Seq, k: int) -> Seq:
    for _ in range(k):
        x = shift(x)
    return x


def concat(x: Word, y: Seq) -> Seq:
    """The concatenation x·y of a finite word with a sequence."""
    if y.is_finite:
        return Seq.finite(tuple(x) + y.pre)
    return Seq.periodic(tuple(x) + y.pre, y.per)


def subblock(x: Seq, start: int, length: int) -> Word:
    """x_start … x_{start+length−1}; the empty word when length is 0."""
    if start < 1 or length < 0:
        raise OutOfRange(f"invalid window start={start} length={length}")
    if length == 0:
        return EMPTY_WORD
    if start + length - 1 > x.length:
        raise OutOfRange(
            f"window {start}..{start + length - 1} exceeds sequence length {x.length}"
        )
    return tuple(x.letter(i) for i in range(start, start + length))


def is_prefix(word: Word, x: Seq) -> bool:
    """True iff word is an initial segment of x."""
    if len(word) > x.length:
        return False
    return x.prefix(len(word)) == tuple(word)


def distinct_windows(x: Seq, length: int) -> set[Word]:
    """Every length-``length`` subblock of x; finitely many for eventually periodic x."""
    if x.is_finite:
        return {x.pre[i:i + length] for i in range(len(x.pre) - length + 1)}
    starts = len(x.pre) + len(x.per)
    return {subblock(x, i, length) for i in range(1, starts + 1)}


# -------------------------------
# Compactified product space
# -------------------------------

class _InfinityMarker:
    """The point ∞ of the one-point compactification A_∞"""

    _instance = None

    def __new__(cls) -> "_InfinityMarker":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "∞"


INFINITY = _InfinityMarker()


class Tail(Enum):
    """What follows the listed entries of a CompactifiedWord"""
    ALL_INFINITY = "all-infinity"
    TRUNCATED = "truncated"


class Truncation(Enum):
    UNKNOWN = "truncation-unknown"


@dataclass(frozen=True)
class CompactifiedWord:
    """A truncation of a point of A_∞ × A_∞ × …"""
    entries: tuple = field(default_factory=tuple)
    tail: Tail = Tail.TRUNCATED


def quotient_map(x: CompactifiedWord) -> Union[Seq, Truncation]:
    """
    The quotient map Q onto the full shift, evaluated on a truncation.

    The image is the prefix before the first ∞; without an observed ∞ the
    answer is only known when the remaining entries are declared all-∞.
    """
    for i, entry in enumerate(x.entries):
        if entry is INFINITY:
            return Seq.finite(tuple(x.entries[:i]))
    if x.tail is Tail.ALL_INFINITY:
        return Seq.finite(tuple(x.entries))
    return Truncation.UNKNOWN


# -------------------------------
# Text form
# -------------------------------

_SYMBOL_RE = re.compile(r"^a([1-9][0-9]*)$")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


def format_letter(letter: Letter) -> str:
    return str(letter)


def format_word(word: Word) -> str:
    if not word:
        return "~"
    return ".".join(format_letter(a) for a in word)


def format_seq(x: Seq) -> str:
    if x.is_finite:
        return format_word(x.pre)
    period = "(" + ".".join(format_letter(a) for a in x.per) + ")"
    if not x.pre:
        return period
    return format_word(x.pre) + "|" + period


def _split_top_level(text: str) -> list[str]:
    parts: list[str] = []
    depth, current = 0, []
    for ch in text:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced '>' in {text!r}")
        if ch == "." and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise ParseError(f"unbalanced '<' in {text!r}")
    parts.append("".join(current))
    return parts


def parse_letter(text: str) -> Letter:
    text = text.strip()
    if text.startswith("<") and text.endswith(">"):
        return Block(parse_word(text[1:-1]))
    match = _SYMBOL_RE.match(text)
    if match:
        return Symbol(int(match.group(1)))
    if _IDENT_RE.match(text):
        return text
    raise ParseError(f"invalid letter {text!r}")


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "~"):
        return EMPTY_WORD
    return tuple(parse_letter(part) for part in _split_top_level(text))


def parse_seq(text: str) -> Seq:
    """Inverse of format_seq on canonical forms."""
    text = text.strip()
    if text.endswith(")"):
        if "(" not in text:
            raise ParseError(f"unbalanced ')' in {text!r}")
        head, _, period = text[:-1].rpartition("(")
        if head and not head.endswith("|"):
            raise ParseError(f"expected '|' before the period in {text!r}")
        per = parse_word(period)
        if not per:
            raise ParseError(f"empty period in {text!r}")
        return Seq.periodic(parse_word(head[:-1]) if head else EMPTY_WORD, per)
    if "|" in text or "(" in text:
        raise ParseError(f"malformed sequence {text!r}")
    return Seq.finite(parse_word(text))
