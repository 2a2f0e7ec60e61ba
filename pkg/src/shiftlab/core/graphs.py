"""
Countable directed graphs

A Graph is an explicit finite part, held in a networkx MultiDiGraph keyed by
edge id, plus any number of generated infinite families attached to explicit
vertices:

    fan   v -h_n-> v_n and v_n -h_nr-> v for n >= 1   (v becomes an infinite emitter)
    ray   v_{n-1} -e_n-> v_n for n >= 1, v_0 = v        (row-finite, infinitely many edges)

Every query that would have to walk an infinite family takes a horizon and
uses the first ``horizon`` members of each family.
"""

import logging
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Callable, Hashable, Iterable, Optional, Union

import networkx as nx

from .errors import InvalidPath, NotRowFinite, UnknownEdge, UnknownVertex
from .seqcore import Block, Letter, Seq, Symbol, Word, letter_key

if TYPE_CHECKING:
    from .spaces import EdgeShift

logger = logging.getLogger(__name__)

VertexId = Hashable


@dataclass(frozen=True)
class Edge:
    id: Letter
    source: VertexId
    range: VertexId


@dataclass(frozen=True)
class Path:
    """A finite path; length-0 paths are vertices and carry source == range."""
    source: VertexId
    range: VertexId
    edges: Word = ()

    @property
    def length(self) -> int:
        return len(self.edges)

    def then(self, other: "Path") -> "Path":
        if self.range != other.source:
            raise InvalidPath(f"cannot extend a path ending at {self.range} by one starting at {other.source}")
        return Path(self.source, other.range, self.edges + other.edges)

    def __str__(self) -> str:
        if not self.edges:
            return f"@{self.source}"
        return ".".join(str(e) for e in self.edges)


def path_key(path: Path) -> tuple:
    return (path.length, tuple(letter_key(e) for e in path.edges), str(path.source))


@dataclass(frozen=True)
class OutEdges:
    """Edges at a vertex: an explicit finite part plus zero or more infinite streams."""
    explicit: tuple[Edge, ...] = ()
    streams: tuple[Callable[[int], Edge], ...] = ()

    @property
    def infinite(self) -> bool:
        return bool(self.streams)

    def take(self, horizon: int) -> list[Edge]:
        taken = list(self.explicit)
        for stream in self.streams:
            taken.extend(stream(n) for n in range(1, horizon + 1))
        return taken


# -------------------------------
# Generated infinite families
# -------------------------------

class InfiniteFamily(ABC):
    """Edges and vertices generated from an anchor vertex, member n = 1, 2, …"""

    kind: str = ""

    def __init__(self, anchor: VertexId, prefix: str) -> None:
        self.anchor = anchor
        self.prefix = prefix
        self._edge_re = re.compile(rf"^{re.escape(prefix)}([1-9][0-9]*)(r?)$")
        self._vertex_re = re.compile(rf"^{re.escape(str(anchor))}_([1-9][0-9]*)$")

    def member_vertex(self, n: int) -> str:
        return f"{self.anchor}_{n}"

    def vertex_member(self, vertex: VertexId) -> Optional[int]:
        if not isinstance(vertex, str):
            return None
        match = self._vertex_re.match(vertex)
        return int(match.group(1)) if match else None

    def vertices(self, horizon: int) -> list[VertexId]:
        return [self.member_vertex(n) for n in range(1, horizon + 1)]

    def edges(self, horizon: int) -> list[Edge]:
        return [e for n in range(1, horizon + 1) for e in self.member_edges(n)]

    @abstractmethod
    def member_edges(self, n: int) -> tuple[Edge, ...]:
        ...

    @abstractmethod
    def find_edge(self, edge_id: Letter) -> Optional[Edge]:
        ...

    @abstractmethod
    def out_edges(self, vertex: VertexId) -> OutEdges:
        ...

    @abstractmethod
    def in_edges(self, vertex: VertexId) -> OutEdges:
        ...

    def describe(self) -> str:
        return f"emitter-infinite {self.anchor} {self.kind} {self.prefix}"


class FanFamily(InfiniteFamily):
    kind = "fan"

    def __init__(self, anchor: VertexId, prefix: str = "h") -> None:
        super().__init__(anchor, prefix)

    def _out(self, n: int) -> Edge:
        return Edge(f"{self.prefix}{n}", self.anchor, self.member_vertex(n))

    def _back(self, n: int) -> Edge:
        return Edge(f"{self.prefix}{n}r", self.member_vertex(n), self.anchor)

    def member_edges(self, n: int) -> tuple[Edge, ...]:
        return (self._out(n), self._back(n))

    def find_edge(self, edge_id: Letter) -> Optional[Edge]:
        if not isinstance(edge_id, str):
            return None
        match = self._edge_re.match(edge_id)
        if not match:
            return None
        n = int(match.group(1))
        return self._back(n) if match.group(2) else self._out(n)

    def out_edges(self, vertex: VertexId) -> OutEdges:
        if vertex == self.anchor:
            return OutEdges(streams=(self._out,))
        n = self.vertex_member(vertex)
        return OutEdges((self._back(n),)) if n else OutEdges()

    def in_edges(self, vertex: VertexId) -> OutEdges:
        if vertex == self.anchor:
            return OutEdges(streams=(self._back,))
        n = self.vertex_member(vertex)
        return OutEdges((self._out(n),)) if n else OutEdges()


class RayFamily(InfiniteFamily):
    kind = "ray"

    def __init__(self, anchor: VertexId, prefix: str = "e") -> None:
        super().__init__(anchor, prefix)

    def _vertex(self, n: int) -> VertexId:
        return self.anchor if n == 0 else self.member_vertex(n)

    def _edge(self, n: int) -> Edge:
        return Edge(f"{self.prefix}{n}", self._vertex(n - 1), self._vertex(n))

    def member_edges(self, n: int) -> tuple[Edge, ...]:
        return (self._edge(n),)

    def find_edge(self, edge_id: Letter) -> Optional[Edge]:
        if not isinstance(edge_id, str):
            return None
        match = self._edge_re.match(edge_id)
        if not match or match.group(2):
            return None
        return self._edge(int(match.group(1)))

    def out_edges(self, vertex: VertexId) -> OutEdges:
        if vertex == self.anchor:
            return OutEdges((self._edge(1),))
        n = self.vertex_member(vertex)
        return OutEdges((self._edge(n + 1),)) if n else OutEdges()

    def in_edges(self, vertex: VertexId) -> OutEdges:
        n = self.vertex_member(vertex)
        return OutEdges((self._edge(n),)) if n else OutEdges()


FAMILIES: dict[str, type[InfiniteFamily]] = {"fan": FanFamily, "ray": RayFamily}


# -------------------------------
# Graph
# -------------------------------

class Graph:
    """
    A countable directed graph E = (E^0, E^1, r, s).

    Example:
        >>> g = Graph("g1", ["u", "v"], [Edge("e", "u", "v"), Edge("f", "v", "u"), Edge("g", "v", "v")])
        >>> sorted(e.id for e in g.out_edges("v").explicit)
        ['f', 'g']
    """

    def __init__(
        self,
        name: str,
        vertices: Iterable[VertexId],
        edges: Iterable[Edge],
        families: Iterable[InfiniteFamily] = (),
        partial: bool = False,
    ) -> None:
        self.name = name
        self.families: tuple[InfiniteFamily, ...] = tuple(families)
        self.partial = partial
        self._nx = nx.MultiDiGraph()
        self._edges: dict[Letter, Edge] = {}

        for v in vertices:
            self._nx.add_node(v)
        for family in self.families:
            if family.anchor not in self._nx:
                raise UnknownVertex(family.anchor)
        for edge in edges:
            for end in (edge.source, edge.range):
                if end not in self._nx:
                    raise UnknownVertex(end)
            if edge.id in self._edges or any(f.find_edge(edge.id) for f in self.families):
                raise ValueError(f"duplicate edge id {edge.id}")
            self._edges[edge.id] = edge
            self._nx.add_edge(edge.source, edge.range, key=edge.id, edge=edge)

    def __repr__(self) -> str:
        return f"Graph({self.name!r}, vertices={self._nx.number_of_nodes()}, edges={len(self._edges)}, families={len(self.families)})"

    # --- finiteness ---

    @property
    def is_finite(self) -> bool:
        """True iff E^0 and E^1 are finite."""
        return not self.families

    @property
    def is_row_finite(self) -> bool:
        return not any(isinstance(f, FanFamily) for f in self.families)

    @property
    def explicit(self) -> nx.MultiDiGraph:
        """The explicit finite part (a read-only view)."""
        return self._nx.copy(as_view=True)

    # --- vertices ---

    def has_vertex(self, v: VertexId) -> bool:
        return v in self._nx or any(f.vertex_member(v) for f in self.families)

    def _require(self, v: VertexId) -> None:
        if not self.has_vertex(v):
            raise UnknownVertex(v)

    def vertices(self, horizon: int = 0) -> list[VertexId]:
        listed = sorted(self._nx.nodes, key=str)
        for family in self.families:
            listed.extend(family.vertices(horizon))
        return listed

    # --- edges ---

    def find_edge(self, edge_id: Letter) -> Optional[Edge]:
        if edge_id in self._edges:
            return self._edges[edge_id]
        for family in self.families:
            edge = family.find_edge(edge_id)
            if edge is not None:
                return edge
        return None

    def edge(self, edge_id: Letter) -> Edge:
        found = self.find_edge(edge_id)
        if found is None:
            raise UnknownEdge(edge_id)
        return found

    def edges(self, horizon: int = 0) -> list[Edge]:
        listed = sorted(self._edges.values(), key=lambda e: letter_key(e.id))
        for family in self.families:
            listed.extend(family.edges(horizon))
        return listed

    def out_edges(self, v: VertexId) -> OutEdges:
        self._require(v)
        explicit: list[Edge] = []
        streams: list[Callable[[int], Edge]] = []
        if v in self._nx:
            explicit.extend(data["edge"] for _, _, data in self._nx.out_edges(v, data=True))
        for family in self.families:
            part = family.out_edges(v)
            explicit.extend(part.explicit)
            streams.extend(part.streams)
        explicit.sort(key=lambda e: letter_key(e.id))
        return OutEdges(tuple(explicit), tuple(streams))

    def in_edges(self, v: VertexId) -> OutEdges:
        self._require(v)
        explicit: list[Edge] = []
        streams: list[Callable[[int], Edge]] = []
        if v in self._nx:
            explicit.extend(data["edge"] for _, _, data in self._nx.in_edges(v, data=True))
        for family in self.families:
            part = family.in_edges(v)
            explicit.extend(part.explicit)
            streams.extend(part.streams)
        explicit.sort(key=lambda e: letter_key(e.id))
        return OutEdges(tuple(explicit), tuple(streams))

    def is_infinite_emitter(self, v: VertexId) -> bool:
        return self.has_vertex(v) and self.out_edges(v).infinite

    def sinks(self) -> list[VertexId]:
        """Sinks among the explicit vertices; generated vertices are never sinks."""
        return [v for v in sorted(self._nx.nodes, key=str) if not self.out_edges(v).take(1)]

    # --- paths ---

    def vertex_path(self, v: VertexId) -> Path:
        self._require(v)
        return Path(v, v)

    def path(self, edge_ids: Iterable[Letter]) -> Path:
        """Validated path from a sequence of edge ids (at least one)."""
        found = [self.edge(e) for e in edge_ids]
        if not found:
            raise InvalidPath("use vertex_path for length-0 paths")
        for first, second in zip(found, found[1:]):
            if first.range != second.source:
                raise InvalidPath(f"{first.id} ends at {first.range} but {second.id} starts at {second.source}")
        return Path(found[0].source, found[-1].range, tuple(e.id for e in found))

    def is_path(self, edge_ids: Iterable[Letter]) -> bool:
        try:
            self.path(edge_ids)
        except (UnknownEdge, InvalidPath):
            return False
        return True

    def is_infinite_path(self, x: Seq) -> bool:
        """True iff the infinite sequence x is a path (checked over pre, one period and the wrap)."""
        if x.is_finite:
            return False
        return self.is_path(x.prefix(len(x.pre) + len(x.per) + 1))


# -------------------------------
# Boundary path space
# -------------------------------

@dataclass(frozen=True)
class InfinitePath:
    seq: Seq

    def __str__(self) -> str:
        return str(self.seq)


@dataclass(frozen=True)
class FinitePathAtInfiniteEmitter:
    path: Path

    def __str__(self) -> str:
        return str(self.path)


BoundaryPathElement = Union[InfinitePath, FinitePathAtInfiniteEmitter]


def boundary_source(g: Graph, x: BoundaryPathElement) -> VertexId:
    if isinstance(x, FinitePathAtInfiniteEmitter):
        return x.path.source
    return g.edge(x.seq.letter(1)).source


def boundary_contains(g: Graph, x: BoundaryPathElement) -> bool:
    if isinstance(x, InfinitePath):
        return g.is_infinite_path(x.seq)
    path = x.path
    if path.length == 0:
        return g.is_infinite_emitter(path.source)
    return g.is_path(path.edges) and g.is_infinite_emitter(g.path(path.edges).range)


def in_boundary_cylinder(
    g: Graph, x: BoundaryPathElement, alpha: Path, excluded: Iterable[Letter] = ()
) -> bool:
    """Membership in Z(α, F): x = α x' with x' in ∂E and x'_1 ∉ F."""
    if not boundary_contains(g, x) or boundary_source(g, x) != alpha.source:
        return False
    n = alpha.length
    if isinstance(x, InfinitePath):
        if x.seq.prefix(n) != alpha.edges:
            return False
        return x.seq.letter(n + 1) not in set(excluded)
    if x.path.edges[:n] != alpha.edges:
        return False
    return x.path.length == n or x.path.edges[n] not in set(excluded)


# -------------------------------
# Operations
# -------------------------------

class VertexKind(Enum):
    SINK = "sink"
    FINITE_EMITTER = "finite-emitter"
    INFINITE_EMITTER = "infinite-emitter"


@dataclass(frozen=True)
class VertexClass:
    kind: VertexKind
    out_degree: Optional[int] = None

    def __str__(self) -> str:
        if self.kind is VertexKind.FINITE_EMITTER:
            return f"{self.kind.value}({self.out_degree})"
        return self.kind.value


def classify_vertex(g: Graph, v: VertexId, probe_bound: int = 8) -> VertexClass:
    out = g.out_edges(v)
    if out.infinite:
        probed = out.take(probe_bound)
        if any(e.source != v for e in probed) or len({e.id for e in probed}) != len(probed):
            logger.warning("edge stream at %s produced inconsistent edges", v)
        return VertexClass(VertexKind.INFINITE_EMITTER)
    if not out.explicit:
        return VertexClass(VertexKind.SINK)
    return VertexClass(VertexKind.FINITE_EMITTER, len(out.explicit))


@dataclass(frozen=True)
class PathSet:
    paths: frozenset
    partial: bool = False

    def sorted(self) -> list[Path]:
        return sorted(self.paths, key=path_key)

    def __len__(self) -> int:
        return len(self.paths)

    def __contains__(self, item: object) -> bool:
        return item in self.paths


def _extend(g: Graph, paths: Iterable[Path], horizon: int) -> tuple[list[Path], bool]:
    extended: list[Path] = []
    partial = False
    for path in paths:
        out = g.out_edges(path.range)
        partial = partial or out.infinite
        for edge in out.take(horizon):
            extended.append(Path(path.source, edge.range, path.edges + (edge.id,)))
    return extended, partial


def enumerate_paths(g: Graph, v: VertexId, n: int, symbol_horizon: int = 8) -> PathSet:
    """vE^n, using the first symbol_horizon edges of any infinite stream."""
    frontier = [g.vertex_path(v)]
    partial = False
    for _ in range(n):
        frontier, step_partial = _extend(g, frontier, symbol_horizon)
        partial = partial or step_partial
    if partial:
        logger.debug("paths of length %d from %s truncated at horizon %d", n, v, symbol_horizon)
    return PathSet(frozenset(frontier), partial)


def all_paths(g: Graph, n: int, horizon: int = 8) -> PathSet:
    """E^n over the vertices within the horizon."""
    paths: set[Path] = set()
    partial = not g.is_finite
    for v in g.vertices(horizon):
        found = enumerate_paths(g, v, n, horizon)
        paths |= found.paths
        partial = partial or found.partial
    return PathSet(frozenset(paths), partial)


def edge_shift(g: Graph) -> "EdgeShift":
    """X_E; graphs with sinks are rejected with HasSink."""
    from .spaces import EdgeShift

    return EdgeShift(g)


def higher_block_graph(g: Graph, N: int, horizon: int = 8) -> Graph:
    """E^[N]: vertices E^{N−1}, edges E^N, s = first N−1 edges, r = last N−1 edges."""
    if N < 2:
        raise ValueError(f"higher block graphs need N >= 2, got {N}")
    if not g.is_row_finite:
        raise NotRowFinite(f"graph {g.name} has infinite emitters")
    vertex_paths = all_paths(g, N - 1, horizon)
    edge_paths = all_paths(g, N, horizon)
    partial = vertex_paths.partial or edge_paths.partial
    if partial:
        logger.warning("higher block graph of %s truncated at horizon %d", g.name, horizon)
    vertices = [Block(p.edges) for p in vertex_paths.sorted()]
    known = set(vertices)
    edges = [
        Edge(Block(p.edges), Block(p.edges[:-1]), Block(p.edges[1:]))
        for p in edge_paths.sorted()
        if Block(p.edges[1:]) in known
    ]
    return Graph(f"{g.name}^[{N}]", vertices, edges, partial=partial)


def one_step_to_graph(
    alphabet: Union[int, Iterable[Letter]],
    forbidden_pairs: Iterable[Word] = (),
    allowed: Optional[Callable[[Letter, Letter], bool]] = None,
    truncated: Optional[bool] = None,
) -> Graph:
    """
    The graph of a 1-step shift: one vertex per letter, one edge ⟨ab⟩ : a → b
    for every pair ab that is not forbidden.

    Args:
        alphabet: a symbol horizon h (letters a_1..a_h of the infinite alphabet) or an
            explicit letter list
        forbidden_pairs: length-2 forbidden blocks
        allowed: optional extra pair predicate
        truncated: mark the graph as a horizon truncation; defaults to True for a
            symbol horizon and False for a letter list
    """
    forbidden = {tuple(w) for w in forbidden_pairs}
    if isinstance(alphabet, int):
        letters: list[Letter] = [Symbol(i) for i in range(1, alphabet + 1)]
    else:
        letters = sorted(set(alphabet), key=letter_key)
    if truncated is None:
        truncated = isinstance(alphabet, int)
    edges = [
        Edge(Block((a, b)), a, b)
        for a in letters
        for b in letters
        if (a, b) not in forbidden and (allowed is None or allowed(a, b))
    ]
    if truncated:
        logger.debug("one-step graph cut at %d letters", len(letters))
    return Graph(f"one-step[{len(letters)}]", letters, edges, partial=truncated)


def edge_shift_forbidden_pairs(g: Graph, horizon: int = 8) -> set[Word]:
    """The 1-step forbidden set {ef : r(e) != s(f)} over the edges within the horizon."""
    edges = g.edges(horizon)
    return {(e.id, f.id) for e in edges for f in edges if e.range != f.source}
