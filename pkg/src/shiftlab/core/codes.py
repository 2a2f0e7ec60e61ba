"""
Sliding block codes

A code is either bounded (one block map Φ with window M) or unbounded (a block
map Φ^a with its own window n(a) for every symbol a). Codes act on infinite
sequences and send the empty sequence to itself.
"""

import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Optional, Union

from .errors import FiniteInputUnsupported, ImageNotInDomain, NotRowFinite, WindowNotInDomain
from .seqcore import Block, Letter, Seq, Word, format_word, shift, subblock, word_key
from .spaces import (
    Membership,
    ShiftClass,
    ShiftPresentation,
    block_language,
)
from .topology import metric_D

logger = logging.getLogger(__name__)


# -------------------------------
# Block maps
# -------------------------------

class BlockMap(ABC):
    """Φ: words of length ``window`` → letters; ``evaluate`` returns None outside the domain."""

    window: int = 1

    @abstractmethod
    def evaluate(self, word: Word) -> Optional[Letter]:
        ...

    def domain(self) -> Optional[list[Word]]:
        """The finite domain, or None when the map is defined by a rule."""
        return None

    def image(self, word: Word) -> Optional[Word]:
        """Φ applied to every window of word; None if some window is outside the domain."""
        word = tuple(word)
        out = []
        for i in range(len(word) - self.window + 1):
            letter = self.evaluate(word[i:i + self.window])
            if letter is None:
                return None
            out.append(letter)
        return tuple(out)

    def describe(self) -> str:
        return f"{type(self).__name__}(window={self.window})"


class TableBlockMap(BlockMap):
    def __init__(self, window: int, table: Mapping[Word, Letter]) -> None:
        if window < 1:
            raise ValueError(f"window must be positive, got {window}")
        for key in table:
            if len(key) != window:
                raise ValueError(f"key {format_word(key)} does not have length {window}")
        self.window = window
        self.table: dict[Word, Letter] = {tuple(k): v for k, v in table.items()}

    def evaluate(self, word: Word) -> Optional[Letter]:
        return self.table.get(tuple(word))

    def domain(self) -> Optional[list[Word]]:
        return sorted(self.table, key=word_key)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TableBlockMap) and (self.window, self.table) == (other.window, other.table)

    def __hash__(self) -> int:
        return hash((self.window, tuple(sorted(self.table.items(), key=lambda kv: word_key(kv[0])))))


class ProjectionBlockMap(BlockMap):
    """w ↦ w_coordinate on every word of length ``window``"""

    def __init__(self, window: int, coordinate: int = 1) -> None:
        if not 1 <= coordinate <= window:
            raise ValueError(f"coordinate {coordinate} outside window {window}")
        self.window = window
        self.coordinate = coordinate

    def evaluate(self, word: Word) -> Optional[Letter]:
        if len(word) != self.window:
            return None
        return word[self.coordinate - 1]

    def describe(self) -> str:
        return f"project {self.coordinate} of {self.window}"


class HigherBlockMap(BlockMap):
    """w ↦ ⟨w⟩, the N-block letter"""

    def __init__(self, N: int) -> None:
        self.window = N

    def evaluate(self, word: Word) -> Optional[Letter]:
        return Block(tuple(word)) if len(word) == self.window else None

    def describe(self) -> str:
        return f"higher-block {self.window}"


class FirstLetterMap(BlockMap):
    """⟨w_1 … w_N⟩ ↦ w_1"""

    window = 1

    def evaluate(self, word: Word) -> Optional[Letter]:
        if len(word) != 1 or not isinstance(word[0], Block) or not word[0].letters:
            return None
        return word[0].letters[0]

    def describe(self) -> str:
        return "first-letter"


class RecodedBlockMap(BlockMap):
    """⟨w⟩ ↦ Ψ(w): a window-M map read as a 1-block map on the M-block alphabet"""

    window = 1

    def __init__(self, inner: BlockMap) -> None:
        self.inner = inner

    def evaluate(self, word: Word) -> Optional[Letter]:
        if len(word) != 1 or not isinstance(word[0], Block):
            return None
        return self.inner.evaluate(word[0].letters)

    def domain(self) -> Optional[list[Word]]:
        inner = self.inner.domain()
        return None if inner is None else [(Block(w),) for w in inner]

    def describe(self) -> str:
        return f"recoded {self.inner.describe()}"


class ComposedBlockMap(BlockMap):
    """Δ(a_1…a_{M+N−1}) = Ψ(Φ(a_1…a_M) … Φ(a_N…a_{M+N−1}))"""

    def __init__(self, first: BlockMap, second: BlockMap) -> None:
        self.first = first
        self.second = second
        self.window = first.window + second.window - 1

    def evaluate(self, word: Word) -> Optional[Letter]:
        if len(word) != self.window:
            return None
        middle = self.first.image(word)
        if middle is None:
            return None
        letter = self.second.evaluate(middle)
        if letter is None:
            raise ImageNotInDomain(format_word(middle))
        return letter

    def describe(self) -> str:
        return f"({self.first.describe()} then {self.second.describe()})"


# -------------------------------
# Codes
# -------------------------------

@dataclass(frozen=True)
class BoundedCode:
    block_map: BlockMap

    @property
    def window(self) -> int:
        return self.block_map.window

    def map_for(self, letter: Letter) -> Optional[BlockMap]:
        return self.block_map

    def describe(self) -> str:
        return f"bounded {self.block_map.describe()}"


@dataclass(frozen=True)
class UnboundedCode:
    """A finite family a ↦ Φ^a; every table key of Φ^a starts with a."""
    family: Mapping[Letter, BlockMap] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for letter, block_map in self.family.items():
            for key in block_map.domain() or ():
                if not key or key[0] != letter:
                    raise ValueError(f"key {format_word(key)} of the map for {letter} must start with it")

    def map_for(self, letter: Letter) -> Optional[BlockMap]:
        return self.family.get(letter)

    @property
    def max_window(self) -> int:
        return max((m.window for m in self.family.values()), default=1)

    def describe(self) -> str:
        return f"unbounded family of {len(self.family)} maps"


SlidingBlockCode = Union[BoundedCode, UnboundedCode]


def identity_code() -> BoundedCode:
    return BoundedCode(ProjectionBlockMap(1, 1))


def apply(c: SlidingBlockCode, x: Seq) -> Seq:
    """
    φ(x)_i = Φ^{x_i}(x_i … x_{i+n(x_i)−1}).

    Windows at positions i and i + |per| agree past the preperiod, so the image
    is pre' = images at 1..|pre| and per' = images at the next |per| positions.
    """
    if x.is_empty:
        return x
    if x.is_finite:
        raise FiniteInputUnsupported(f"sliding block codes do not act on the finite sequence {x}")
    images = []
    for i in range(1, len(x.pre) + len(x.per) + 1):
        block_map = c.map_for(x.letter(i))
        if block_map is None:
            raise WindowNotInDomain(i, x.letter(i))
        window = subblock(x, i, block_map.window)
        letter = block_map.evaluate(window)
        if letter is None:
            raise WindowNotInDomain(i, format_word(window))
        images.append(letter)
    return Seq.periodic(tuple(images[:len(x.pre)]), tuple(images[len(x.pre):]))


def _table_domain(first: TableBlockMap, length: int) -> list[Word]:
    """Words of the given length all of whose windows lie in the table."""
    keys = first.domain() or []
    words = list(keys)
    by_prefix: dict[Word, list[Letter]] = {}
    for key in keys:
        by_prefix.setdefault(key[:-1], []).append(key[-1])
    for _ in range(length - first.window):
        words = [
            w + (a,)
            for w in words
            for a in by_prefix.get(w[len(w) - first.window + 1:], [])
        ]
    return words


def compose(
    phi: BoundedCode,
    psi: BoundedCode,
    source: Optional[ShiftPresentation] = None,
    horizon: int = 8,
) -> BoundedCode:
    """The (M+N−1)-block code ψ∘φ; tabulated when φ has a finite domain."""
    lazy = ComposedBlockMap(phi.block_map, psi.block_map)
    first = phi.block_map
    if not isinstance(first, TableBlockMap):
        return BoundedCode(lazy)
    words = _table_domain(first, lazy.window)
    if source is not None:
        present = block_language(source, lazy.window, horizon).words
        words = [w for w in words if w in present]
    table: dict[Word, Letter] = {}
    for w in words:
        letter = lazy.evaluate(w)
        if letter is not None:
            table[w] = letter
    return BoundedCode(TableBlockMap(lazy.window, table))


def higher_block_code(X: ShiftPresentation, N: int, horizon: int = 8) -> tuple[BoundedCode, BoundedCode]:
    """(φ_N, π_N): the N-block code onto X^[N] and its 1-block inverse."""
    if X.classify(horizon) is ShiftClass.NOT_ROW_FINITE:
        raise NotRowFinite(f"{X.describe()} is not row-finite")
    if N == 1:
        return identity_code(), identity_code()
    return BoundedCode(HigherBlockMap(N)), BoundedCode(FirstLetterMap())


def recode_to_1block(psi: BoundedCode, X: Optional[ShiftPresentation] = None) -> BoundedCode:
    """ψ^[M] with ψ^[M] ∘ φ_M = ψ."""
    if psi.window == 1:
        return psi
    return BoundedCode(RecodedBlockMap(psi.block_map))


def has_first_coordinate_pattern(delta: BlockMap, words: Iterable[Word]) -> Optional[Word]:
    """The first word w with Δ(w) != w_1, or None when Δ is the first-coordinate map on words."""
    for w in words:
        if delta.evaluate(w) != w[0]:
            return tuple(w)
    return None


# -------------------------------
# Conjugacy witnesses
# -------------------------------

class VerificationStatus(Enum):
    UNCHECKED = "unchecked"
    VERIFIED = "verified"
    REFUTED = "refuted"


@dataclass(frozen=True)
class VerificationResult:
    status: VerificationStatus
    depth: int = 0
    counterexample: str = ""
    checks: int = 0
    # finite samples, which codes do not act on
    skipped: int = 0

    def __str__(self) -> str:
        if self.status is VerificationStatus.VERIFIED:
            return f"verified to depth {self.depth}"
        if self.status is VerificationStatus.REFUTED:
            return f"refuted: {self.counterexample}"
        return "unchecked"


UNCHECKED = VerificationResult(VerificationStatus.UNCHECKED)


@dataclass(frozen=True)
class ConjugacyWitness:
    forward: SlidingBlockCode
    backward: SlidingBlockCode
    source: ShiftPresentation
    target: ShiftPresentation
    status: VerificationResult = UNCHECKED

    def with_status(self, status: VerificationResult) -> "ConjugacyWitness":
        return replace(self, status=status)


def _check_blocks(
    code: SlidingBlockCode,
    source: ShiftPresentation,
    target: ShiftPresentation,
    depth: int,
    horizon: int,
) -> tuple[Optional[str], int]:
    if not isinstance(code, BoundedCode):
        logger.debug("block check skipped for %s", code.describe())
        return None, 0
    checks = 0
    M = code.window
    for k in range(M, depth + 1):
        images = block_language(target, k - M + 1, horizon).words
        for w in block_language(source, k, horizon).sorted():
            checks += 1
            image = code.block_map.image(w)
            if image is None:
                return f"block {format_word(w)} is outside the block map domain", checks
            if image not in images:
                return f"block {format_word(w)} maps to {format_word(image)}, not a block of the target", checks
    return None, checks


def verify_conjugacy(
    w: ConjugacyWitness, depth_L: int, samples: Iterable[Seq], horizon: int = 8
) -> VerificationResult:
    """
    Bounded verification of a conjugacy witness: block images up to depth_L,
    round trips and shift commutation on the samples (finite nonempty samples
    are counted in `skipped`), and Δ(w) = w_1 for the
    composed block map when both codes are bounded.
    """
    checks = 0
    skipped = 0

    def refuted(reason: str) -> VerificationResult:
        logger.debug("conjugacy refuted: %s", reason)
        return VerificationResult(VerificationStatus.REFUTED, depth_L, reason, checks, skipped)

    for code, source, target in ((w.forward, w.source, w.target), (w.backward, w.target, w.source)):
        problem, done = _check_blocks(code, source, target, depth_L, horizon)
        checks += done
        if problem:
            return refuted(problem)

    try:
        for x in samples:
            if x.is_finite and not x.is_empty:
                skipped += 1
                continue
            y = apply(w.forward, x)
            checks += 4
            if apply(w.backward, y) != x:
                return refuted(f"backward(forward({x})) = {apply(w.backward, y)}")
            if apply(w.forward, apply(w.backward, y)) != y:
                return refuted(f"forward(backward({y})) != {y}")
            for code, z in ((w.forward, x), (w.backward, y)):
                if apply(code, shift(z)) != shift(apply(code, z)):
                    return refuted(f"{code.describe()} does not commute with the shift at {z}")
    except (WindowNotInDomain, ImageNotInDomain, FiniteInputUnsupported) as exc:
        return refuted(str(exc))

    if isinstance(w.forward, BoundedCode) and isinstance(w.backward, BoundedCode):
        delta = compose(w.forward, w.backward, w.source, horizon)
        words = block_language(w.source, delta.window, horizon).sorted()
        checks += len(words)
        try:
            bad = has_first_coordinate_pattern(delta.block_map, words)
        except ImageNotInDomain as exc:
            return refuted(str(exc))
        if bad is not None:
            return refuted(f"composed map sends {format_word(bad)} to {delta.block_map.evaluate(bad)}")

    if skipped:
        logger.debug("%d finite samples skipped", skipped)
    return VerificationResult(VerificationStatus.VERIFIED, depth_L, "", checks, skipped)


# -------------------------------
# Boundedness
# -------------------------------

class BoundednessStatus(Enum):
    UNIFORMLY_CONTINUOUS_AT_SCALE = "uniformly-continuous-at-scale"
    VIOLATION_WITNESS = "violation-witness"


@dataclass(frozen=True)
class BoundednessReport:
    status: BoundednessStatus
    delta_exponent: int
    pairs_checked: int = 0
    witness: Optional[tuple[Seq, Seq]] = None


def _agree(x: Seq, y: Seq, n: int) -> bool:
    """D(x, y) < 1/2**n, i.e. the first n entries agree."""
    distance = metric_D(x, y)
    return distance.is_zero or (distance.exponent or 0) > n


def probe_boundedness(
    c: SlidingBlockCode,
    X: ShiftPresentation,
    epsilon_exponent: int,
    sample_pool: Iterable[Seq],
    search_bound: Optional[int] = None,
    horizon: int = 8,
) -> BoundednessReport:
    """
    Falsifier for uniform continuity in the boundedness metric.

    Bounded codes with window M: every pair closer than 1/2^(M+N) must have
    images closer than 1/2^N. Unbounded codes: a witness is reported when for
    every k up to the search bound some pair agrees on k entries while the
    images are at least 1/2^N apart.
    """
    pool = [x for x in sample_pool if not x.is_finite]
    for x in pool:
        if X.contains(x, horizon) is Membership.NO:
            logger.warning("sample %s is not a member of %s", x, X.describe())
    pairs = list(itertools.combinations(pool, 2))
    images = {x: apply(c, x) for x in pool}
    N = epsilon_exponent

    if isinstance(c, BoundedCode):
        delta = c.window + N
        for x, y in pairs:
            if _agree(x, y, delta) and not _agree(images[x], images[y], N):
                return BoundednessReport(BoundednessStatus.VIOLATION_WITNESS, delta, len(pairs), (x, y))
        return BoundednessReport(BoundednessStatus.UNIFORMLY_CONTINUOUS_AT_SCALE, delta, len(pairs))

    bound = search_bound if search_bound is not None else c.max_window + N
    witness: Optional[tuple[Seq, Seq]] = None
    for k in range(1, bound + 1):
        witness = next(
            (
                (x, y)
                for x, y in pairs
                if _agree(x, y, k) and not _agree(images[x], images[y], N)
            ),
            None,
        )
        if witness is None:
            return BoundednessReport(BoundednessStatus.UNIFORMLY_CONTINUOUS_AT_SCALE, k, len(pairs))
    return BoundednessReport(BoundednessStatus.VIOLATION_WITNESS, bound, len(pairs), witness)
