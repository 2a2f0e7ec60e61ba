"""
Shift spaces

Presentations of shift spaces over countable alphabets:

    ForbiddenBlocks   X_F for a finite forbidden set F over a finite or countably infinite alphabet
    PairRuleShift     1-step spaces whose (possibly infinite) forbidden pairs follow a closed-form rule
    EdgeShift         X_E of a directed graph without sinks
    HigherBlockShift  the N-block presentation X^[N]

Each presentation answers membership, block-language, extension and
classification queries. Queries that would range over infinitely many symbols
take a horizon and report whether the answer is exact.
"""

import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, Optional, Sequence

import networkx as nx

from .errors import BlockTooLong, EmptyPresentation, HasSink, NotAMember, NotRowFinite
from .graphs import Graph, RayFamily, all_paths
from .seqcore import (
    EMPTY_WORD,
    Block,
    Letter,
    Seq,
    Symbol,
    Word,
    distinct_windows,
    format_word,
    word_key,
)

logger = logging.getLogger(__name__)


class Membership(Enum):
    YES = "yes"
    NO = "no"
    PARTIAL_YES = "partial-yes"


class ShiftClass(Enum):
    FINITE_SYMBOL = "finite-symbol"
    ROW_FINITE_INFINITE = "row-finite-infinite"
    NOT_ROW_FINITE = "not-row-finite"
    UNKNOWN = "unknown"


class ExtensionStatus(Enum):
    HOLDS = "holds"
    FAILS_WITH_WITNESS = "fails-with-witness"
    PARTIAL_HOLDS = "partial-holds"


@dataclass(frozen=True)
class ExtensionResult:
    """Symbols a for which x·a continues to an infinite member"""
    status: ExtensionStatus
    symbols: tuple = ()


@dataclass(frozen=True)
class BlockLanguage:
    """B_n(X), computed under a horizon"""
    n: int
    words: frozenset = field(default_factory=frozenset)
    partial: bool = False

    def sorted(self) -> list[Word]:
        return sorted(self.words, key=word_key)

    def __contains__(self, word: object) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)


def symbol_range(horizon: int) -> list[Symbol]:
    return [Symbol(i) for i in range(1, horizon + 1)]


# -------------------------------
# Presentations
# -------------------------------

class ShiftPresentation(ABC):
    """A finite description of a shift space X"""

    name: str = "shift"

    @abstractmethod
    def letters(self, horizon: int) -> list[Letter]:
        """The letters that may occur in members, cut at the horizon."""

    @abstractmethod
    def contains(self, x: Seq, horizon: int) -> Membership:
        ...

    @abstractmethod
    def blocks(self, n: int, horizon: int) -> BlockLanguage:
        """B_n(X) for n >= 1."""

    @abstractmethod
    def extension(self, x: Word, demand: int, horizon: int) -> ExtensionResult:
        ...

    @abstractmethod
    def classify(self, horizon: int) -> ShiftClass:
        ...

    def describe(self) -> str:
        return self.name


class ForbiddenBlocks(ShiftPresentation):
    """
    X_F: sequences none of whose subblocks lie in F.

    ``alphabet`` None means the countably infinite alphabet a1, a2, …;
    otherwise it is the finite list of letters.
    """

    def __init__(
        self,
        blocks: Iterable[Word] = (),
        alphabet: Optional[Sequence[Letter]] = None,
        name: str = "forbidden",
    ) -> None:
        self.forbidden: frozenset = frozenset(tuple(w) for w in blocks)
        if EMPTY_WORD in self.forbidden:
            raise EmptyPresentation("the empty word is forbidden, so X_F is empty")
        self.alphabet: Optional[tuple] = tuple(alphabet) if alphabet is not None else None
        if self.alphabet is None and any(
            not isinstance(a, Symbol) for w in self.forbidden for a in w
        ):
            raise ValueError("blocks over the infinite alphabet must use symbols a<k>")
        self.name = name
        self._lengths = sorted({len(w) for w in self.forbidden})

    @classmethod
    def finite_symbols(cls, blocks: Iterable[Word], n: int, name: str = "forbidden") -> "ForbiddenBlocks":
        return cls(blocks, symbol_range(n), name)

    @property
    def infinite_alphabet(self) -> bool:
        return self.alphabet is None

    @property
    def step(self) -> int:
        """M for which every forbidden block has length at most M + 1."""
        return max(self._lengths, default=1) - 1

    def describe(self) -> str:
        alphabet = "infinite" if self.alphabet is None else f"finite:{len(self.alphabet)}"
        return f"{self.name} ({alphabet}, |F|={len(self.forbidden)})"

    def letters(self, horizon: int) -> list[Letter]:
        if self.alphabet is None:
            return list(symbol_range(horizon))
        return list(self.alphabet)

    def _in_alphabet(self, letters: Iterable[Letter]) -> bool:
        if self.alphabet is None:
            return all(isinstance(a, Symbol) for a in letters)
        allowed = set(self.alphabet)
        return all(a in allowed for a in letters)

    def allowed(self, word: Word) -> bool:
        """True iff no subblock of word is forbidden."""
        for length in self._lengths:
            for i in range(len(word) - length + 1):
                if word[i:i + length] in self.forbidden:
                    return False
        return True

    def _allowed_seq(self, x: Seq) -> bool:
        for length in self._lengths:
            if distinct_windows(x, length) & self.forbidden:
                return False
        return True

    # state graph on the last k letters, finite alphabet only
    @cached_property
    def _state_width(self) -> int:
        return max(self.step, 1)

    @cached_property
    def _extendable_states(self) -> frozenset:
        k = self._state_width
        states = [w for w in itertools.product(self.alphabet or (), repeat=k) if self.allowed(w)]
        graph = nx.DiGraph()
        graph.add_nodes_from(states)
        for u in states:
            for a in self.alphabet or ():
                if self.allowed(u + (a,)):
                    graph.add_edge(u, u[1:] + (a,))
        cyclic: set = set()
        for component in nx.strongly_connected_components(graph):
            node = next(iter(component))
            if len(component) > 1 or graph.has_edge(node, node):
                cyclic |= component
        good = set(cyclic)
        for node in cyclic:
            good |= nx.ancestors(graph, node)
        logger.debug("%s: %d of %d states extend forever", self.name, len(good), len(states))
        return frozenset(good)

    def extends(self, word: Word) -> bool:
        """True iff word is the prefix of an infinite member."""
        word = tuple(word)
        if not self._in_alphabet(word) or not self.allowed(word):
            return False
        if self.alphabet is None:
            return True
        k = self._state_width
        if len(word) >= k:
            return word[-k:] in self._extendable_states
        return any(state[:len(word)] == word for state in self._extendable_states)

    def contains(self, x: Seq, horizon: int = 8) -> Membership:
        if x.is_empty:
            return Membership.YES if self.alphabet is None else Membership.NO
        if not self._in_alphabet(x.letters()):
            return Membership.NO
        if not x.is_finite:
            return Membership.YES if self._allowed_seq(x) else Membership.NO
        # a symbol absent from F may follow any allowed word and repeat forever
        if self.alphabet is None and self.allowed(x.pre):
            return Membership.YES
        return Membership.NO

    def blocks(self, n: int, horizon: int = 8) -> BlockLanguage:
        words = frozenset(
            w for w in itertools.product(self.letters(horizon), repeat=n) if self.extends(w)
        )
        return BlockLanguage(n, words, partial=self.alphabet is None)

    def extension(self, x: Word, demand: int, horizon: int = 8) -> ExtensionResult:
        x = tuple(x)
        if self.alphabet is None:
            found: list[Letter] = []
            index = 1
            while len(found) < demand:
                a = Symbol(index)
                if self.allowed(x + (a,)):
                    found.append(a)
                index += 1
            return ExtensionResult(ExtensionStatus.HOLDS, tuple(found))
        symbols = tuple(a for a in self.alphabet if self.extends(x + (a,)))
        return ExtensionResult(ExtensionStatus.FAILS_WITH_WITNESS, symbols)

    def classify(self, horizon: int = 8) -> ShiftClass:
        if self.alphabet is not None:
            return ShiftClass.FINITE_SYMBOL
        return ShiftClass.NOT_ROW_FINITE


class FullShift(ForbiddenBlocks):
    """The full shift over the countably infinite alphabet (F = ∅)"""

    def __init__(self) -> None:
        super().__init__((), None, name="full")


class PairRuleShift(ShiftPresentation):
    """
    A 1-step shift over a1, a2, … where a_i a_j is allowed iff ``allowed(i, j)``.

    The rule must be reflexive. ``successors(i)`` returns the finite list of
    allowed j, or None when a_i has infinitely many successors; without it,
    finite membership is only decided up to the horizon.
    """

    def __init__(
        self,
        name: str,
        allowed: Callable[[int, int], bool],
        successors: Optional[Callable[[int], Optional[list[int]]]] = None,
        row_finite: Optional[bool] = None,
    ) -> None:
        self.name = name
        self.rule = allowed
        self.successors = successors
        self.row_finite = row_finite

    def letters(self, horizon: int) -> list[Letter]:
        return list(symbol_range(horizon))

    def allowed(self, word: Word) -> bool:
        if not all(isinstance(a, Symbol) for a in word):
            return False
        return all(self.rule(a.index, b.index) for a, b in zip(word, word[1:]))

    def forbidden_pairs(self, horizon: int) -> set[Word]:
        letters = symbol_range(horizon)
        return {(a, b) for a in letters for b in letters if not self.rule(a.index, b.index)}

    def _successors_of(self, last: Symbol) -> Optional[list[Symbol]]:
        if self.successors is None:
            return None
        found = self.successors(last.index)
        return None if found is None else [Symbol(j) for j in found]

    def contains(self, x: Seq, horizon: int = 8) -> Membership:
        if x.is_empty:
            return Membership.YES
        if not all(isinstance(a, Symbol) for a in x.letters()):
            return Membership.NO
        if not x.is_finite:
            pairs = distinct_windows(x, 2)
            ok = all(self.rule(a.index, b.index) for a, b in pairs)
            return Membership.YES if ok else Membership.NO
        if not self.allowed(x.pre):
            return Membership.NO
        last = x.pre[-1]
        if self.successors is not None:
            return Membership.YES if self._successors_of(last) is None else Membership.NO
        if self.rule(last.index, horizon):
            logger.warning("membership of %s in %s only checked up to a%d", x, self.name, horizon)
            return Membership.PARTIAL_YES
        return Membership.NO

    def blocks(self, n: int, horizon: int = 8) -> BlockLanguage:
        letters = symbol_range(horizon)
        words: list[Word] = [(a,) for a in letters]
        for _ in range(n - 1):
            words = [w + (b,) for w in words for b in letters if self.rule(w[-1].index, b.index)]
        return BlockLanguage(n, frozenset(words), partial=True)

    def extension(self, x: Word, demand: int, horizon: int = 8) -> ExtensionResult:
        x = tuple(x)
        if not x:
            return ExtensionResult(ExtensionStatus.HOLDS, tuple(symbol_range(demand)))
        known = self._successors_of(x[-1])
        if known is not None:
            return ExtensionResult(ExtensionStatus.FAILS_WITH_WITNESS, tuple(known))
        if self.successors is not None:
            found, index = [], 1
            while len(found) < demand:
                if self.rule(x[-1].index, index):
                    found.append(Symbol(index))
                index += 1
            return ExtensionResult(ExtensionStatus.HOLDS, tuple(found))
        within = tuple(b for b in symbol_range(horizon) if self.rule(x[-1].index, b.index))
        return ExtensionResult(ExtensionStatus.PARTIAL_HOLDS, within)

    def classify(self, horizon: int = 8) -> ShiftClass:
        if self.row_finite is True:
            return ShiftClass.ROW_FINITE_INFINITE
        if self.row_finite is False:
            return ShiftClass.NOT_ROW_FINITE
        return ShiftClass.UNKNOWN


class EdgeShift(ShiftPresentation):
    """X_E: the closure of the infinite path space of a graph with no sinks"""

    def __init__(self, graph: Graph) -> None:
        sinks = graph.sinks()
        if sinks:
            raise HasSink(sinks[0])
        self.graph = graph
        self.name = f"edges:{graph.name}"

    def letters(self, horizon: int) -> list[Letter]:
        return [e.id for e in self.graph.edges(horizon)]

    def contains(self, x: Seq, horizon: int = 8) -> Membership:
        if x.is_empty:
            return Membership.NO if self.graph.is_finite else Membership.YES
        if not x.is_finite:
            return Membership.YES if self.graph.is_infinite_path(x) else Membership.NO
        if not self.graph.is_path(x.pre):
            return Membership.NO
        end = self.graph.path(x.pre).range
        return Membership.YES if self.graph.is_infinite_emitter(end) else Membership.NO

    def blocks(self, n: int, horizon: int = 8) -> BlockLanguage:
        found = all_paths(self.graph, n, horizon)
        return BlockLanguage(n, frozenset(p.edges for p in found.paths), found.partial)

    def extension(self, x: Word, demand: int, horizon: int = 8) -> ExtensionResult:
        x = tuple(x)
        if not x:
            edges = [e.id for e in self.graph.edges(max(horizon, demand))]
            status = ExtensionStatus.FAILS_WITH_WITNESS if self.graph.is_finite else ExtensionStatus.HOLDS
            return ExtensionResult(status, tuple(edges))
        out = self.graph.out_edges(self.graph.path(x).range)
        if out.infinite:
            return ExtensionResult(ExtensionStatus.HOLDS, tuple(e.id for e in out.take(demand)))
        return ExtensionResult(ExtensionStatus.FAILS_WITH_WITNESS, tuple(e.id for e in out.explicit))

    def classify(self, horizon: int = 8) -> ShiftClass:
        if self.graph.is_finite:
            return ShiftClass.FINITE_SYMBOL
        if self.graph.is_row_finite:
            return ShiftClass.ROW_FINITE_INFINITE
        return ShiftClass.NOT_ROW_FINITE


def decode_blocks(word: Word) -> Word:
    """⟨w1…wN⟩⟨w2…wN+1⟩… ↦ w1 … wN+n−1; the inverse of the progressive overlap."""
    if not word:
        return EMPTY_WORD
    return tuple(word[0].letters) + tuple(b.letters[-1] for b in word[1:])


def encode_blocks(word: Word, N: int) -> Word:
    """w ↦ ⟨w1…wN⟩⟨w2…wN+1⟩…"""
    return tuple(Block(tuple(word[i:i + N])) for i in range(len(word) - N + 1))


class HigherBlockShift(ShiftPresentation):
    """X^[N]: the image of X under the N-block code, over the alphabet B_N(X)"""

    def __init__(self, base: ShiftPresentation, N: int, horizon: int = 8) -> None:
        if N < 1:
            raise ValueError(f"N must be positive, got {N}")
        if base.classify(horizon) is ShiftClass.NOT_ROW_FINITE:
            raise NotRowFinite(f"{base.describe()} is not row-finite")
        self.base = base
        self.N = N
        self.name = f"{base.name}^[{N}]"

    def letters(self, horizon: int) -> list[Letter]:
        return [Block(w) for w in self.base.blocks(self.N, horizon).sorted()]

    def _overlapping(self, word: Word) -> bool:
        if not all(isinstance(b, Block) and len(b) == self.N for b in word):
            return False
        return all(b.letters[1:] == c.letters[:-1] for b, c in zip(word, word[1:]))

    def contains(self, x: Seq, horizon: int = 8) -> Membership:
        if x.is_empty:
            return self.base.contains(x, horizon)
        if x.is_finite:
            return Membership.NO
        window = x.prefix(len(x.pre) + len(x.per) + 1)
        if not self._overlapping(window):
            return Membership.NO
        decoded = Seq.periodic(
            tuple(b.letters[0] for b in x.pre), tuple(b.letters[0] for b in x.per)
        )
        return self.base.contains(decoded, horizon)

    def blocks(self, n: int, horizon: int = 8) -> BlockLanguage:
        source = self.base.blocks(n + self.N - 1, horizon)
        words = frozenset(encode_blocks(w, self.N) for w in source.words)
        return BlockLanguage(n, words, source.partial)

    def extension(self, x: Word, demand: int, horizon: int = 8) -> ExtensionResult:
        x = tuple(x)
        if not x:
            letters = tuple(self.letters(horizon))
            status = (
                ExtensionStatus.FAILS_WITH_WITNESS
                if self.base.classify(horizon) is ShiftClass.FINITE_SYMBOL
                else ExtensionStatus.PARTIAL_HOLDS
            )
            return ExtensionResult(status, letters)
        decoded = decode_blocks(x)
        longer = self.base.blocks(len(decoded) + 1, horizon)
        symbols = tuple(
            Block(w[-self.N:]) for w in longer.sorted() if w[:-1] == decoded
        )
        return ExtensionResult(ExtensionStatus.FAILS_WITH_WITNESS, symbols)

    def classify(self, horizon: int = 8) -> ShiftClass:
        return self.base.classify(horizon)


# -------------------------------
# Built-in presentations
# -------------------------------

def hub_pairs() -> PairRuleShift:
    """a_i a_j allowed iff i = 1 or i = j: a1 may be followed by anything, the rest only repeat."""
    return PairRuleShift(
        "hub_pairs",
        lambda i, j: i == 1 or i == j,
        successors=lambda i: None if i == 1 else [i],
        row_finite=False,
    )


def ladder() -> PairRuleShift:
    """a_i a_j allowed iff j ∈ {i, i+1}: row-finite with infinitely many symbols."""
    return PairRuleShift(
        "ladder",
        lambda i, j: j in (i, i + 1),
        successors=lambda i: [i, i + 1],
        row_finite=True,
    )


def ray_graph(prefix: str = "e") -> Graph:
    """The infinite ray v → v_1 → v_2 → … with edges e1, e2, …"""
    return Graph("ray", ["v"], [], [RayFamily("v", prefix)])


BUILTINS: dict[str, Callable[[], ShiftPresentation]] = {
    "full": FullShift,
    "hub_pairs": hub_pairs,
    "ladder": ladder,
    "ray": lambda: EdgeShift(ray_graph()),
}
# names used by existing scripts and fixtures
BUILTIN_ALIASES = {"ex5_18_pairs": "hub_pairs", "ex5_17_ray": "ray"}


def builtin(name: str) -> ShiftPresentation:
    key = BUILTIN_ALIASES.get(name, name)
    if key not in BUILTINS:
        raise KeyError(f"unknown built-in shift {name!r}; choose from {sorted(BUILTINS)}")
    return BUILTINS[key]()


# -------------------------------
# Operations
# -------------------------------

def contains(p: ShiftPresentation, x: Seq, horizon: int = 8) -> Membership:
    return p.contains(x, horizon)


def block_language(p: ShiftPresentation, n: int, horizon: int = 8) -> BlockLanguage:
    if n == 0:
        return BlockLanguage(0, frozenset({EMPTY_WORD}), False)
    language = p.blocks(n, horizon)
    if language.partial:
        logger.debug("B_%d of %s truncated at horizon %d", n, p.describe(), horizon)
    return language


def check_infinite_extension(
    p: ShiftPresentation, x: Word, demand: int, horizon: int = 8
) -> ExtensionResult:
    """The infinite-extension property at a finite member x."""
    x = tuple(x)
    if p.contains(Seq.finite(x), horizon) is Membership.NO:
        raise NotAMember(format_word(x))
    result = p.extension(x, demand, horizon)
    if result.status is ExtensionStatus.HOLDS and len(result.symbols) < demand:
        return ExtensionResult(ExtensionStatus.PARTIAL_HOLDS, result.symbols)
    return result


def classify(p: ShiftPresentation, horizon: int = 8) -> ShiftClass:
    return p.classify(horizon)


def canonical_forbidden_set(p: ShiftPresentation, max_len: int, horizon: int = 8) -> set[Word]:
    """Words of length 1..max_len over the horizon alphabet that occur in no member."""
    letters = p.letters(horizon)
    missing: set[Word] = set()
    for n in range(1, max_len + 1):
        present = block_language(p, n, horizon).words
        missing |= {w for w in itertools.product(letters, repeat=n) if w not in present}
    return missing


def rebuild_from_forbidden(p: ShiftPresentation, max_len: int, horizon: int = 8) -> ForbiddenBlocks:
    """X_F for F = canonical_forbidden_set over the horizon alphabet."""
    return ForbiddenBlocks(
        canonical_forbidden_set(p, max_len, horizon), p.letters(horizon), name=f"{p.name}-rebuilt"
    )


def pad_to_M_step(
    F: Iterable[Word], M: int, horizon: int = 8, alphabet: Optional[Sequence[Letter]] = None
) -> set[Word]:
    """F' = {uv : u ∈ F, l(uv) = M + 1}; X_F' and X_F have the same infinite members."""
    letters = list(alphabet) if alphabet is not None else symbol_range(horizon)
    padded: set[Word] = set()
    for u in F:
        u = tuple(u)
        if len(u) > M + 1:
            raise BlockTooLong(format_word(u), M + 1)
        for v in itertools.product(letters, repeat=M + 1 - len(u)):
            padded.add(u + v)
    return padded


def one_step_forbidden_pairs(p: ShiftPresentation, M: int, horizon: int = 8) -> set[Word]:
    """
    Forbidden pairs of X^[M] over the alphabet B_M(X): ⟨u⟩⟨v⟩ is forbidden unless
    u and v overlap progressively and the merged word lies in B_{M+1}(X).
    """
    letters = [w for w in block_language(p, M, horizon).sorted()]
    longer = block_language(p, M + 1, horizon).words
    pairs: set[Word] = set()
    for u in letters:
        for v in letters:
            if u[1:] != v[:-1] or u + v[-1:] not in longer:
                pairs.add((Block(u), Block(v)))
    return pairs
