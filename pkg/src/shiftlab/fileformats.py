"""
Text formats for graphs, presentations, block maps and algebra elements

All formats are line based, UTF-8. Blank lines and lines starting with ``#``
are ignored; fields are separated by whitespace. Letters use the sequence
syntax: ``a<k>`` for alphabet symbols, plain identifiers for graph ids and
``<x.y>`` for block letters.

Graph::

    graph <name>
    vertex <id>
    edge <id> <src> <dst>
    emitter-infinite <vertex> fan|ray [prefix]

Presentation::

    shift forbidden finite:<N> | infinite | letters <letter> ...
    block <word>
    shift edges <graph-file>
    shift builtin <name>

Block map (bounded, or unbounded with one section per symbol)::

    blockmap <name> window <M>
    map <word> <letter>
    default project <k> | default higher-block | default first-letter
    family <symbol> window <n>

Algebra element, one term per line::

    <coefficient> * <alpha> ; <beta>        paths as e.f.g, or @v for a vertex

Every parse error carries the 1-based line number.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path as FilePath
from typing import Iterator, Optional, Union

from shiftlab.core.ckalg import AlgebraElement, AlgebraTerm
from shiftlab.core.codes import (
    BlockMap,
    BoundedCode,
    FirstLetterMap,
    HigherBlockMap,
    ProjectionBlockMap,
    SlidingBlockCode,
    TableBlockMap,
    UnboundedCode,
)
from shiftlab.core.errors import InvalidPath, ParseError, UnknownEdge, UnknownVertex
from shiftlab.core.graphs import (
    FAMILIES,
    BoundaryPathElement,
    Edge,
    FinitePathAtInfiniteEmitter,
    Graph,
    InfiniteFamily,
    InfinitePath,
    Path,
)
from shiftlab.core.seqcore import (
    Letter,
    Symbol,
    Word,
    format_letter,
    format_word,
    letter_key,
    parse_letter,
    parse_seq,
    parse_word,
    word_key,
)
from shiftlab.core.spaces import (
    BUILTIN_ALIASES,
    BUILTINS,
    EdgeShift,
    ForbiddenBlocks,
    FullShift,
    PairRuleShift,
    ShiftPresentation,
    builtin,
    symbol_range,
)

logger = logging.getLogger(__name__)


# -------------------------------
# Shared helpers
# -------------------------------

def _records(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def _expect(fields: list[str], counts: tuple[int, ...], lineno: int) -> None:
    if len(fields) not in counts:
        usage = " or ".join(str(c - 1) for c in counts)
        raise ParseError(f"'{fields[0]}' takes {usage} argument(s), got {len(fields) - 1}", lineno)


def _letter(text: str, lineno: int) -> Letter:
    try:
        return parse_letter(text)
    except ParseError as exc:
        raise ParseError(exc.message, lineno) from None


def _word(text: str, lineno: int) -> Word:
    try:
        return parse_word(text)
    except ParseError as exc:
        raise ParseError(exc.message, lineno) from None


def _int(text: str, lineno: int, what: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {text!r}", lineno) from None
    if value < 1:
        raise ParseError(f"{what} must be positive, got {value}", lineno)
    return value


def _read(path: Union[str, FilePath]) -> str:
    return FilePath(path).read_text(encoding="utf-8")


# -------------------------------
# Graphs
# -------------------------------

def parse_graph(text: str) -> Graph:
    name: Optional[str] = None
    vertices: dict[Letter, int] = {}
    edges: dict[Letter, Edge] = {}
    families: list[InfiniteFamily] = []

    for lineno, fields in _records(text):
        keyword = fields[0]
        if name is None:
            if keyword != "graph" or len(fields) != 2:
                raise ParseError("expected 'graph <name>' as the first line", lineno)
            name = fields[1]
            continue
        if keyword == "vertex":
            _expect(fields, (2,), lineno)
            v = _letter(fields[1], lineno)
            if v in vertices:
                raise ParseError(f"duplicate vertex {v}", lineno)
            vertices[v] = lineno
        elif keyword == "edge":
            _expect(fields, (4,), lineno)
            e, src, dst = (_letter(f, lineno) for f in fields[1:])
            for end in (src, dst):
                if end not in vertices:
                    raise ParseError(f"edge {e} uses undeclared vertex {end}", lineno)
            if e in edges or any(f.find_edge(e) for f in families):
                raise ParseError(f"duplicate edge id {e}", lineno)
            edges[e] = Edge(e, src, dst)
        elif keyword == "emitter-infinite":
            _expect(fields, (3, 4), lineno)
            anchor = _letter(fields[1], lineno)
            if anchor not in vertices:
                raise ParseError(f"undeclared vertex {anchor}", lineno)
            kind = fields[2]
            if kind not in FAMILIES:
                raise ParseError(f"unknown generator {kind!r}; choose from {sorted(FAMILIES)}", lineno)
            family_type = FAMILIES[kind]
            if len(fields) == 4:
                prefix = fields[3]
                if not prefix.isidentifier() or prefix == "a":
                    raise ParseError(f"invalid edge prefix {prefix!r}", lineno)
                family = family_type(anchor, prefix)
            else:
                family = family_type(anchor)
            clash = next((e for e in edges if family.find_edge(e)), None)
            if clash is not None:
                raise ParseError(f"generated edges collide with edge {clash}", lineno)
            families.append(family)
        elif keyword == "graph":
            raise ParseError("a file holds a single graph", lineno)
        else:
            raise ParseError(f"unknown keyword {keyword!r}", lineno)

    if name is None:
        raise ParseError("empty graph file", 1)
    logger.debug("parsed graph %s: %d vertices, %d edges, %d families", name, len(vertices), len(edges), len(families))
    return Graph(name, list(vertices), list(edges.values()), families)


def format_graph(g: Graph) -> str:
    lines = [f"graph {g.name}"]
    lines += [f"vertex {format_letter(v)}" for v in sorted(g.vertices(0), key=letter_key)]
    lines += [
        f"edge {format_letter(e.id)} {format_letter(e.source)} {format_letter(e.range)}"
        for e in g.edges(0)
    ]
    lines += [family.describe() for family in g.families]
    return "\n".join(lines) + "\n"


def load_graph(path: Union[str, FilePath]) -> Graph:
    return parse_graph(_read(path))


# -------------------------------
# Presentations
# -------------------------------

def _forbidden_alphabet(fields: list[str], lineno: int) -> Optional[list[Letter]]:
    if len(fields) < 3:
        raise ParseError("expected 'shift forbidden finite:<N> | infinite | letters ...'", lineno)
    kind = fields[2]
    if kind == "infinite" and len(fields) == 3:
        return None
    if kind.startswith("finite:") and len(fields) == 3:
        return list(symbol_range(_int(kind[len("finite:"):], lineno, "alphabet size")))
    if kind == "letters" and len(fields) > 3:
        return [_letter(f, lineno) for f in fields[3:]]
    raise ParseError(f"invalid alphabet {' '.join(fields[2:])!r}", lineno)


def parse_presentation(text: str, base_dir: Union[str, FilePath] = ".") -> ShiftPresentation:
    """``shift edges`` paths are resolved against ``base_dir``."""
    header: Optional[list[str]] = None
    header_line = 0
    alphabet: Optional[list[Letter]] = None
    blocks: list[Word] = []

    for lineno, fields in _records(text):
        keyword = fields[0]
        if header is None:
            if keyword != "shift" or len(fields) < 2:
                raise ParseError("expected a 'shift' header as the first line", lineno)
            header, header_line = fields, lineno
            kind = fields[1]
            if kind == "forbidden":
                alphabet = _forbidden_alphabet(fields, lineno)
            elif kind in ("edges", "builtin"):
                _expect(fields[1:], (2,), lineno)
            else:
                raise ParseError(f"unknown shift kind {kind!r}", lineno)
            continue
        if keyword != "block" or header[1] != "forbidden":
            raise ParseError(f"unexpected line {' '.join(fields)!r}", lineno)
        _expect(fields, (2,), lineno)
        word = _word(fields[1], lineno)
        known = set(alphabet) if alphabet is not None else None
        for a in word:
            if known is not None and a not in known:
                raise ParseError(f"letter {a} is outside the alphabet", lineno)
            if known is None and not isinstance(a, Symbol):
                raise ParseError(f"letter {a} is not a symbol a<k>", lineno)
        blocks.append(word)

    if header is None:
        raise ParseError("empty presentation file", 1)
    if header[1] == "edges":
        graph_file = FilePath(base_dir) / header[2]
        try:
            return EdgeShift(load_graph(graph_file))
        except ParseError as exc:
            raise ParseError(f"{graph_file}: {exc}", header_line) from None
    if header[1] == "builtin":
        return _builtin(header[2], header_line)
    return ForbiddenBlocks(blocks, alphabet)


def _builtin(name: str, lineno: Optional[int]) -> ShiftPresentation:
    try:
        return builtin(name)
    except KeyError:
        names = sorted(set(BUILTINS) | set(BUILTIN_ALIASES))
        raise ParseError(f"unknown built-in shift {name!r}; choose from {names}", lineno) from None


def format_presentation(p: ShiftPresentation) -> str:
    """ForbiddenBlocks as a forbidden-block file; built-ins by name."""
    if isinstance(p, FullShift):
        return "shift builtin full\n"
    if isinstance(p, PairRuleShift) and p.name in BUILTINS:
        return f"shift builtin {p.name}\n"
    if isinstance(p, EdgeShift) and p.graph.name in BUILTINS:
        return f"shift builtin {p.graph.name}\n"
    if not isinstance(p, ForbiddenBlocks):
        raise ValueError(f"{p.describe()} has no forbidden-block file form")
    if p.alphabet is None:
        header = "shift forbidden infinite"
    elif list(p.alphabet) == list(symbol_range(len(p.alphabet))):
        header = f"shift forbidden finite:{len(p.alphabet)}"
    else:
        header = "shift forbidden letters " + " ".join(format_letter(a) for a in p.alphabet)
    lines = [header] + [f"block {format_word(w)}" for w in sorted(p.forbidden, key=word_key)]
    return "\n".join(lines) + "\n"


def load_presentation(path: Union[str, FilePath]) -> ShiftPresentation:
    path = FilePath(path)
    return parse_presentation(_read(path), path.parent)


def load_shift(argument: str) -> ShiftPresentation:
    """A CLI shift argument: ``edges:<graph-file>``, ``builtin:<name>`` or a presentation file."""
    kind, sep, rest = argument.partition(":")
    if sep and kind == "edges":
        return EdgeShift(load_graph(rest))
    if sep and kind == "builtin":
        return _builtin(rest, None)
    return load_presentation(argument)


# -------------------------------
# Block maps and codes
# -------------------------------

@dataclass(frozen=True)
class NamedCode:
    name: str
    code: SlidingBlockCode


class _Section:
    def __init__(self, window: int, lineno: int, letter: Optional[Letter] = None) -> None:
        self.window = window
        self.lineno = lineno
        self.letter = letter
        self.table: dict[Word, Letter] = {}
        self.default: Optional[list[str]] = None

    def add_map(self, fields: list[str], lineno: int) -> None:
        _expect(fields, (3,), lineno)
        word = _word(fields[1], lineno)
        if len(word) != self.window:
            raise ParseError(f"word {format_word(word)} does not have length {self.window}", lineno)
        if self.letter is not None and word[0] != self.letter:
            raise ParseError(f"word {format_word(word)} must start with {self.letter}", lineno)
        if word in self.table:
            raise ParseError(f"duplicate map for {format_word(word)}", lineno)
        self.table[word] = _letter(fields[2], lineno)

    def set_default(self, fields: list[str], lineno: int) -> None:
        if self.default is not None:
            raise ParseError("duplicate default", lineno)
        self.default = fields[1:]
        self.build_default(lineno)

    def build_default(self, lineno: int) -> BlockMap:
        assert self.default is not None
        kind = self.default[0] if self.default else ""
        if kind == "project" and len(self.default) == 2:
            k = _int(self.default[1], lineno, "coordinate")
            if k > self.window:
                raise ParseError(f"coordinate {k} outside window {self.window}", lineno)
            return ProjectionBlockMap(self.window, k)
        if kind == "higher-block" and len(self.default) == 1:
            return HigherBlockMap(self.window)
        if kind == "first-letter" and len(self.default) == 1:
            if self.window != 1:
                raise ParseError("first-letter needs window 1", lineno)
            return FirstLetterMap()
        raise ParseError(f"invalid default {' '.join(self.default)!r}", lineno)

    def block_map(self) -> BlockMap:
        if self.default is not None:
            if self.table:
                raise ParseError("a section has either map lines or a default, not both", self.lineno)
            return self.build_default(self.lineno)
        if not self.table:
            raise ParseError("section has no map lines", self.lineno)
        return TableBlockMap(self.window, self.table)


def parse_code(text: str) -> NamedCode:
    name: Optional[str] = None
    top: Optional[_Section] = None
    families: dict[Letter, _Section] = {}
    current: Optional[_Section] = None

    for lineno, fields in _records(text):
        keyword = fields[0]
        if name is None:
            if keyword != "blockmap" or len(fields) not in (2, 4) or (len(fields) == 4 and fields[2] != "window"):
                raise ParseError("expected 'blockmap <name> [window <M>]' as the first line", lineno)
            name = fields[1]
            if len(fields) == 4:
                top = current = _Section(_int(fields[3], lineno, "window"), lineno)
            continue
        if keyword == "family":
            if top is not None:
                raise ParseError("family sections need a header without a window", lineno)
            if len(fields) != 4 or fields[2] != "window":
                raise ParseError("expected 'family <symbol> window <n>'", lineno)
            letter = _letter(fields[1], lineno)
            if letter in families:
                raise ParseError(f"duplicate family for {letter}", lineno)
            current = families[letter] = _Section(_int(fields[3], lineno, "window"), lineno, letter)
        elif keyword in ("map", "default"):
            if current is None:
                raise ParseError(f"'{keyword}' outside a section", lineno)
            if keyword == "map":
                current.add_map(fields, lineno)
            else:
                current.set_default(fields, lineno)
        else:
            raise ParseError(f"unknown keyword {keyword!r}", lineno)

    if name is None:
        raise ParseError("empty block map file", 1)
    if top is not None:
        return NamedCode(name, BoundedCode(top.block_map()))
    if not families:
        raise ParseError("block map has neither a window nor family sections", 1)
    return NamedCode(name, UnboundedCode({a: s.block_map() for a, s in families.items()}))


def _format_body(block_map: BlockMap) -> list[str]:
    if isinstance(block_map, ProjectionBlockMap):
        return [f"default project {block_map.coordinate}"]
    if isinstance(block_map, HigherBlockMap):
        return ["default higher-block"]
    if isinstance(block_map, FirstLetterMap):
        return ["default first-letter"]
    domain = block_map.domain()
    if domain is None:
        raise ValueError(f"{block_map.describe()} has no finite table")
    return [f"map {format_word(w)} {format_letter(block_map.evaluate(w))}" for w in domain]


def format_code(named: NamedCode) -> str:
    code = named.code
    if isinstance(code, BoundedCode):
        lines = [f"blockmap {named.name} window {code.window}"] + _format_body(code.block_map)
    else:
        lines = [f"blockmap {named.name}"]
        for letter in sorted(code.family, key=letter_key):
            block_map = code.family[letter]
            lines.append(f"family {format_letter(letter)} window {block_map.window}")
            lines += _format_body(block_map)
    return "\n".join(lines) + "\n"


def load_code(path: Union[str, FilePath]) -> NamedCode:
    return parse_code(_read(path))


# -------------------------------
# Paths, boundary paths and algebra elements
# -------------------------------

def parse_path(text: str, g: Graph) -> Path:
    """``@v`` or dot-joined edge ids."""
    text = text.strip()
    if text.startswith("@"):
        return g.vertex_path(parse_letter(text[1:]))
    word = parse_word(text)
    if not word:
        raise ParseError("empty path; use @<vertex> for a vertex")
    return g.path(word)


def parse_boundary_path(text: str, g: Graph) -> BoundaryPathElement:
    """An eventually periodic sequence for infinite paths, else a finite path."""
    text = text.strip()
    if text.endswith(")"):
        return InfinitePath(parse_seq(text))
    return FinitePathAtInfiniteEmitter(parse_path(text, g))


def parse_element(text: str, g: Graph) -> AlgebraElement:
    terms: dict[AlgebraTerm, Fraction] = {}
    for lineno, fields in _records(text):
        line = " ".join(fields)
        if line == "0":
            continue
        coefficient, star, rest = line.partition("*")
        alpha, semi, beta = rest.partition(";")
        if not star or not semi:
            raise ParseError("expected '<coefficient> * <alpha> ; <beta>'", lineno)
        try:
            value = Fraction(coefficient.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"invalid coefficient {coefficient.strip()!r}", lineno) from None
        try:
            term = AlgebraTerm(parse_path(alpha, g), parse_path(beta, g))
        except ParseError as exc:
            raise ParseError(exc.message, lineno) from None
        except (UnknownEdge, UnknownVertex, InvalidPath) as exc:
            raise ParseError(str(exc), lineno) from None
        if term.alpha.range != term.beta.range:
            raise ParseError(f"r({term.alpha}) != r({term.beta})", lineno)
        terms[term] = terms.get(term, Fraction(0)) + value
    return AlgebraElement(g, terms)


def format_element(a: AlgebraElement) -> str:
    if a.is_zero:
        return "0\n"
    return "\n".join(f"{c} * {t}" for t, c in a.sorted_terms()) + "\n"


def load_element(path: Union[str, FilePath], g: Graph) -> AlgebraElement:
    return parse_element(_read(path), g)

