"""
Topology of the full shift

Cylinder sets, the 0/1 embedding coordinates and basic open sets, the
enumeration-dependent metric d_A, the boundedness metric D on infinite
sequences, and a bounded verifier for sequential convergence.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import DisjointnessViolation, NotInfinite
from .seqcore import EMPTY_WORD, Seq, Symbol, Word, is_prefix

logger = logging.getLogger(__name__)


# -------------------------------
# Distances
# -------------------------------

@dataclass(frozen=True)
class Dyadic:
    """
    The distance 1/2**exponent, or 0 when exponent is None.

    Enumeration indices grow very quickly with symbol indices, so distances
    are compared through their exponents and only expanded into a Fraction
    on request.
    """
    exponent: Optional[int] = None

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    @property
    def value(self) -> Fraction:
        if self.exponent is None:
            return Fraction(0)
        return Fraction(1, 1 << self.exponent)

    def _rank(self) -> float:
        # larger exponent means smaller distance
        return float("inf") if self.exponent is None else self.exponent

    def __lt__(self, other: "Dyadic") -> bool:
        return self._rank() > other._rank()

    def __le__(self, other: "Dyadic") -> bool:
        return self._rank() >= other._rank()

    def __gt__(self, other: "Dyadic") -> bool:
        return self._rank() < other._rank()

    def __ge__(self, other: "Dyadic") -> bool:
        return self._rank() <= other._rank()

    def __add__(self, other: "Dyadic") -> Fraction:
        return self.value + other.value

    def __str__(self) -> str:
        return "0" if self.exponent is None else f"1/2^{self.exponent}"


ZERO_DISTANCE = Dyadic()


# -------------------------------
# Canonical word enumeration
# -------------------------------

def _symbol_indices(word: Word) -> tuple[int, ...]:
    indices = []
    for letter in word:
        if not isinstance(letter, Symbol):
            raise ValueError(f"the word enumeration covers symbol words only, got {letter!r}")
        indices.append(letter.index)
    return tuple(indices)


def shell(word: Word) -> int:
    """max(length, largest symbol index); 0 for the empty word."""
    indices = _symbol_indices(word)
    return max((len(indices), *indices)) if indices else 0


def _shell_total(s: int) -> int:
    """Number of words whose shell is at most s."""
    if s < 0:
        return 0
    return sum(s ** length for length in range(s + 1))


def _count_in_shell(s: int, length: int, free: bool) -> int:
    """Words of the given length over a1..as that land in shell s."""
    if free or length == s:
        return s ** length
    return s ** length - (s - 1) ** length


class WordEnumeration:
    """
    Bijection between positive integers and finite symbol words.

    Shells are listed in increasing order; inside a shell words are ordered by
    length and then lexicographically by symbol index, so the listing starts
    ~, a1, a2, a1.a1, a1.a2, a2.a1, a2.a2, a3, …
    """

    def index(self, word: Word) -> int:
        digits = _symbol_indices(word)
        s = shell(word)
        if s == 0:
            return 1
        position = _shell_total(s - 1)
        for length in range(1, len(digits)):
            position += _count_in_shell(s, length, False)
        has_top = False
        for i, digit in enumerate(digits):
            rest = len(digits) - 1 - i
            per_choice = _count_in_shell(s, rest, has_top or len(digits) == s)
            position += (digit - 1) * per_choice
            has_top = has_top or digit == s
        return position + 1

    def word_at(self, n: int) -> Word:
        if n < 1:
            raise ValueError(f"enumeration indices start at 1, got {n}")
        s = 0
        while _shell_total(s) < n:
            s += 1
        if s == 0:
            return EMPTY_WORD
        offset = n - _shell_total(s - 1) - 1
        length = 1
        while offset >= _count_in_shell(s, length, False):
            offset -= _count_in_shell(s, length, False)
            length += 1

        digits: list[int] = []
        has_top = False
        for i in range(length):
            rest = length - 1 - i
            for digit in range(1, s + 1):
                block = _count_in_shell(s, rest, has_top or length == s or digit == s)
                if offset < block:
                    digits.append(digit)
                    has_top = has_top or digit == s
                    break
                offset -= block
        return tuple(Symbol(d) for d in digits)


ENUMERATION = WordEnumeration()


# -------------------------------
# Cylinders and basic open sets
# -------------------------------

@dataclass(frozen=True)
class CylinderSpec:
    """Z(base, excluded); with no exclusions this is the plain cylinder Z(base)."""
    base: Word
    excluded: frozenset = field(default_factory=frozenset)


def cylinder_contains(c: CylinderSpec, x: Seq) -> bool:
    if not is_prefix(c.base, x):
        return False
    if x.length > len(c.base):
        return x.letter(len(c.base) + 1) not in c.excluded
    return True


def cylinder_intersection(x: Word, y: Word) -> Optional[CylinderSpec]:
    """Z(x) ∩ Z(y): the cylinder of the longer word when one extends the other, else None."""
    x, y = tuple(x), tuple(y)
    if y[:len(x)] == x:
        return CylinderSpec(y)
    if x[:len(y)] == y:
        return CylinderSpec(x)
    return None


def alpha_coordinate(x: Seq, y: Word) -> int:
    """The y-th coordinate of the embedding of x into {0,1}^words."""
    return 1 if is_prefix(tuple(y), x) else 0


def in_basic_open(x: Seq, F: Iterable[Word], G: Iterable[Word]) -> bool:
    required = {tuple(w) for w in F}
    forbidden = {tuple(w) for w in G}
    if required & forbidden:
        raise DisjointnessViolation(
            f"words appear in both F and G: {sorted(map(str, required & forbidden))}"
        )
    return all(alpha_coordinate(x, w) == 1 for w in required) and all(
        alpha_coordinate(x, w) == 0 for w in forbidden
    )


# -------------------------------
# Metrics
# -------------------------------

def common_prefix_length(x: Seq, y: Seq) -> Optional[int]:
    """Length of the longest common prefix, or None when x == y."""
    if x == y:
        return None
    i = 0
    while True:
        if i >= x.length or i >= y.length:
            return i
        if x.letter(i + 1) != y.letter(i + 1):
            return i
        i += 1


def metric_dA(x: Seq, y: Seq) -> Dyadic:
    """
    d_A(x, y) = 1/2**i for the least enumeration index i of a word that is an
    initial segment of exactly one of x and y.

    Enumeration indices increase along the prefixes of a single sequence, so
    the least distinguishing word is the shorter-indexed of the two one-letter
    extensions of the longest common prefix.
    """
    k = common_prefix_length(x, y)
    if k is None:
        return ZERO_DISTANCE
    candidates = [s.prefix(k + 1) for s in (x, y) if s.length > k]
    return Dyadic(min(ENUMERATION.index(w) for w in candidates))


def metric_D(x: Seq, y: Seq) -> Dyadic:
    """Boundedness metric: 1/2**n for the first position n where x and y differ."""
    if x.is_finite or y.is_finite:
        raise NotInfinite("the boundedness metric is defined on infinite sequences only")
    k = common_prefix_length(x, y)
    return ZERO_DISTANCE if k is None else Dyadic(k + 1)


# -------------------------------
# Convergence
# -------------------------------

@dataclass(frozen=True)
class ConvergenceReport:
    """Outcome of a bounded convergence check over a finite family"""
    holds: bool
    tail_start: int
    family_size: int


def _matches_limit(xn: Seq, x: Seq, depth: int, test_symbols: frozenset) -> bool:
    if not x.is_finite:
        return xn.length >= depth and xn.prefix(depth) == x.prefix(depth)
    n = len(x.pre)
    if xn.length < n or xn.prefix(n) != x.pre:
        return False
    return xn.length == n or xn.letter(n + 1) not in test_symbols


def check_convergence(
    xs: list[Seq],
    x: Seq,
    depth_M: int,
    test_F: Iterable[Symbol] = (),
) -> ConvergenceReport:
    """
    Bounded verifier of sequential convergence.

    Infinite limit: members must agree with x on entries 1..depth_M.
    Finite limit: members must extend x and their next symbol must avoid test_F.
    The report names the least N after which every member of the family
    matches; it holds when that tail is nonempty.
    """
    if not xs:
        raise ValueError("check_convergence needs a nonempty family")
    test_symbols = frozenset(test_F)
    tail_start = 0
    for n, xn in enumerate(xs, start=1):
        if not _matches_limit(xn, x, depth_M, test_symbols):
            tail_start = n
    holds = tail_start < len(xs)
    logger.debug("convergence check: tail starts after %d of %d", tail_start, len(xs))
    return ConvergenceReport(holds=holds, tail_start=tail_start, family_size=len(xs))
