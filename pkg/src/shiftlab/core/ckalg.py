"""
Cuntz–Krieger families and graph groupoids, symbolically

Elements of the Leavitt path algebra of a graph over the rationals are finite
sums of terms αβ* with r(α) = r(β). Products follow the relations

    p_v p_w = δ_{v,w} p_v,   s(e) e = e r(e) = e,   e* f = δ_{e,f} r(e)

and equality is decided modulo the remaining relation p_v = Σ_{s(e)=v} e e*
by expanding both sides to a common depth.

The second half handles the graph groupoid: triples (αγ, l(α) − l(β), βγ) on
the boundary path space, their composition, and the maps induced by a
conjugacy of edge shifts.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Union

from .codes import BlockMap, ConjugacyWitness, SlidingBlockCode, apply
from .errors import (
    AmbiguousPreimage,
    FiniteInputUnsupported,
    GraphMismatch,
    NoIncomingEdge,
    NoPreimage,
    NotComposable,
    NotInGroupoid,
    UnsupportedGraph,
    WellDefinednessViolation,
    WindowMismatch,
    WindowNotInDomain,
)
from .graphs import (
    BoundaryPathElement,
    FinitePathAtInfiniteEmitter,
    Graph,
    InfinitePath,
    Path,
    VertexId,
    boundary_contains,
    boundary_source,
    enumerate_paths,
    path_key,
)
from .seqcore import Letter, concat, shift_by

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]


# -------------------------------
# Terms and elements
# -------------------------------

@dataclass(frozen=True)
class AlgebraTerm:
    """αβ*; the vertex idempotent p_v is (@v, @v)."""
    alpha: Path
    beta: Path

    @property
    def degree(self) -> int:
        return self.alpha.length - self.beta.length

    @property
    def depth(self) -> int:
        return min(self.alpha.length, self.beta.length)

    def adjoint(self) -> "AlgebraTerm":
        return AlgebraTerm(self.beta, self.alpha)

    def __str__(self) -> str:
        return f"{self.alpha} ; {self.beta}"


def term_key(term: AlgebraTerm) -> tuple:
    return (path_key(term.alpha), path_key(term.beta))


def _split_prefix(prefix: Path, path: Path) -> Optional[Path]:
    """The rest of ``path`` after ``prefix``, or None when prefix does not start it."""
    if prefix.source != path.source or path.edges[:prefix.length] != prefix.edges:
        return None
    return Path(prefix.range, path.range, path.edges[prefix.length:])


def multiply_terms(left: AlgebraTerm, right: AlgebraTerm) -> Optional[AlgebraTerm]:
    """(αβ*)(γδ*) = αγ'δ* if γ = βγ', α(δβ')* if β = γβ', and 0 otherwise."""
    rest = _split_prefix(left.beta, right.alpha)
    if rest is not None:
        return AlgebraTerm(left.alpha.then(rest), right.beta)
    rest = _split_prefix(right.alpha, left.beta)
    if rest is not None:
        return AlgebraTerm(left.alpha, right.beta.then(rest))
    return None


class AlgebraElement:
    """
    A rational combination of terms over one graph.

    ``==`` compares stored terms; use ``equal`` for equality in the algebra.
    """

    __slots__ = ("graph", "terms")

    def __init__(self, graph: Graph, terms: Optional[Mapping[AlgebraTerm, Scalar]] = None) -> None:
        self.graph = graph
        cleaned: dict[AlgebraTerm, Fraction] = {}
        for term, coefficient in (terms or {}).items():
            if term.alpha.range != term.beta.range:
                continue
            value = Fraction(coefficient)
            if value:
                cleaned[term] = value
        self.terms: dict[AlgebraTerm, Fraction] = cleaned

    @classmethod
    def zero(cls, graph: Graph) -> "AlgebraElement":
        return cls(graph)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[AlgebraTerm, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: term_key(item[0]))

    def degrees(self) -> set[int]:
        return {term.degree for term in self.terms}

    @property
    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> Optional[int]:
        """The common degree of a nonzero homogeneous element, else None."""
        degrees = self.degrees()
        return degrees.pop() if len(degrees) == 1 else None

    def _check(self, other: "AlgebraElement") -> None:
        if other.graph is not self.graph:
            raise GraphMismatch(f"elements over {self.graph.name} and {other.graph.name}")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        summed = dict(self.terms)
        for term, coefficient in other.terms.items():
            summed[term] = summed.get(term, Fraction(0)) + coefficient
        return AlgebraElement(self.graph, summed)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.graph, {t: -c for t, c in self.terms.items()})

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def __mul__(self, other: Union["AlgebraElement", Scalar]) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return AlgebraElement(self.graph, {t: c * other for t, c in self.terms.items()})

    def __rmul__(self, other: Scalar) -> "AlgebraElement":
        return self * other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.graph is other.graph and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(self.sorted_terms()))

    def __repr__(self) -> str:
        return f"AlgebraElement({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c} * {t}" for t, c in self.sorted_terms())


# -------------------------------
# Generators
# -------------------------------

def vertex_projection(g: Graph, v: VertexId) -> AlgebraElement:
    """p_v"""
    at = g.vertex_path(v)
    return AlgebraElement(g, {AlgebraTerm(at, at): 1})


def edge_isometry(g: Graph, e: Letter) -> AlgebraElement:
    """s_e"""
    edge = g.edge(e)
    return AlgebraElement(g, {AlgebraTerm(g.path([e]), g.vertex_path(edge.range)): 1})


def ghost_edge(g: Graph, e: Letter) -> AlgebraElement:
    """s_e*"""
    return adjoint(edge_isometry(g, e))


def path_element(g: Graph, alpha: Path, beta: Path, coefficient: Scalar = 1) -> AlgebraElement:
    """coefficient · αβ*"""
    return AlgebraElement(g, {AlgebraTerm(alpha, beta): coefficient})


def total(g: Graph, elements: Iterable[AlgebraElement]) -> AlgebraElement:
    result = AlgebraElement.zero(g)
    for element in elements:
        result = result + element
    return result


# -------------------------------
# Operations
# -------------------------------

def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    product: dict[AlgebraTerm, Fraction] = {}
    for left, x in a.terms.items():
        for right, y in b.terms.items():
            term = multiply_terms(left, right)
            if term is not None:
                product[term] = product.get(term, Fraction(0)) + x * y
    return AlgebraElement(a.graph, product)


def adjoint(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.graph, {t.adjoint(): c for t, c in a.terms.items()})


def _require_supported(g: Graph) -> None:
    if not g.is_finite:
        raise UnsupportedGraph(f"graph {g.name} is infinite")
    sinks = g.sinks()
    if sinks:
        raise UnsupportedGraph(f"graph {g.name} has a sink at {sinks[0]}")


def expand_to_depth(a: AlgebraElement, depth: int) -> dict[AlgebraTerm, Fraction]:
    """Rewrite αβ* = Σ_{s(e)=r(α)} (αe)(βe)* until every term has min(l(α), l(β)) >= depth."""
    pending = list(a.terms.items())
    done: dict[AlgebraTerm, Fraction] = {}
    while pending:
        term, coefficient = pending.pop()
        if term.depth >= depth:
            done[term] = done.get(term, Fraction(0)) + coefficient
            continue
        for edge in a.graph.out_edges(term.alpha.range).explicit:
            step = Path(edge.source, edge.range, (edge.id,))
            pending.append((AlgebraTerm(term.alpha.then(step), term.beta.then(step)), coefficient))
    return {t: c for t, c in done.items() if c}


def equal(a: AlgebraElement, b: AlgebraElement) -> bool:
    """Equality in the algebra: both sides expanded to the deepest stored depth."""
    a._check(b)
    _require_supported(a.graph)
    depth = max((t.depth for t in (*a.terms, *b.terms)), default=0)
    return expand_to_depth(a, depth) == expand_to_depth(b, depth)


def pushforward(images: "CKImages", element: AlgebraElement) -> AlgebraElement:
    """Apply the generator map as a *-homomorphism: αβ* ↦ π(s_α) π(s_β)*."""
    target = images.target

    def along(path: Path) -> AlgebraElement:
        if not path.edges:
            return images.vertices[path.source]
        result = images.edges[path.edges[0]]
        for e in path.edges[1:]:
            result = multiply(result, images.edges[e])
        return result

    result = AlgebraElement.zero(target)
    for term, coefficient in element.terms.items():
        result = result + multiply(along(term.alpha), adjoint(along(term.beta))) * coefficient
    return result


# -------------------------------
# Generator images of a conjugacy
# -------------------------------

@dataclass
class CKImages:
    """π(s_e) and π(p_v) for every edge and vertex of the source graph"""
    source: Graph
    target: Graph
    edges: dict[Letter, AlgebraElement] = field(default_factory=dict)
    vertices: dict[VertexId, AlgebraElement] = field(default_factory=dict)

    def generators(self) -> Iterator[tuple[str, AlgebraElement]]:
        for e, image in self.edges.items():
            yield f"s_{e}", image
        for v, image in self.vertices.items():
            yield f"p_{v}", image


def identity_images(g: Graph) -> CKImages:
    return CKImages(
        g,
        g,
        {e.id: edge_isometry(g, e.id) for e in g.edges()},
        {v: vertex_projection(g, v) for v in g.vertices()},
    )


def _image_edge(F: Graph, phi: BlockMap, path: Path) -> Letter:
    letter = phi.evaluate(path.edges)
    if letter is None:
        raise WindowMismatch(f"the block map is undefined on {path}")
    if F.find_edge(letter) is None:
        raise WindowMismatch(f"the block map sends {path} to {letter}, which is not an edge of {F.name}")
    return letter


def theorem813_images(E: Graph, F: Graph, phi: BlockMap, n: Optional[int] = None) -> CKImages:
    """
    π(s_e) = Σ t_g over g = Φ(eα), α ∈ r(e)E^{n−1}, and
    π(p_v) = Σ t_g t_g* over g = Φ(β), β ∈ vE^n; each t_g counted once.
    """
    for graph in (E, F):
        _require_supported(graph)
    n = phi.window if n is None else n
    if n != phi.window:
        raise WindowMismatch(f"window {phi.window} does not match n = {n}")
    images = CKImages(E, F)
    for edge in E.edges():
        targets = {
            _image_edge(F, phi, Path(edge.source, tail.range, (edge.id,) + tail.edges))
            for tail in enumerate_paths(E, edge.range, n - 1).paths
        }
        images.edges[edge.id] = total(F, (edge_isometry(F, g) for g in targets))
    for v in E.vertices():
        targets = {_image_edge(F, phi, beta) for beta in enumerate_paths(E, v, n).paths}
        images.vertices[v] = total(
            F, (multiply(edge_isometry(F, g), ghost_edge(F, g)) for g in targets)
        )
    return images


@dataclass(frozen=True)
class CKCheck:
    valid: bool
    relation: str = ""
    witness: str = ""
    checks: int = 0

    def __str__(self) -> str:
        return "valid" if self.valid else f"failed {self.relation} at {self.witness}"


def verify_ck_family(images: CKImages, E: Graph) -> CKCheck:
    """Projections and orthogonality, then CK1 for every edge, then CK2 at every non-sink vertex."""
    F = images.target
    checks = 0
    vertices = sorted(images.vertices, key=str)
    for i, v in enumerate(vertices):
        p = images.vertices[v]
        checks += 2
        if not equal(multiply(p, p), p) or not equal(adjoint(p), p):
            return CKCheck(False, "projection", str(v), checks)
        for w in vertices[i + 1:]:
            checks += 1
            if not equal(multiply(p, images.vertices[w]), AlgebraElement.zero(F)):
                return CKCheck(False, "orthogonality", f"{v},{w}", checks)
    for edge in E.edges():
        s = images.edges[edge.id]
        checks += 1
        if not equal(multiply(adjoint(s), s), images.vertices[edge.range]):
            return CKCheck(False, "CK1", str(edge.id), checks)
    for v in vertices:
        out = E.out_edges(v).explicit
        if not out:
            continue
        checks += 1
        expected = total(F, (multiply(images.edges[e.id], adjoint(images.edges[e.id])) for e in out))
        if not equal(images.vertices[v], expected):
            return CKCheck(False, "CK2", str(v), checks)
    logger.debug("generator images over %s pass %d relation checks", F.name, checks)
    return CKCheck(True, checks=checks)


def surjectivity_witness(
    images: CKImages, a: Letter, E: Graph, F: Graph, phi: BlockMap, psi: Optional[BlockMap] = None
) -> AlgebraElement:
    """
    An element of the source algebra mapped onto t_a:
    s_e · Σ s_f s_f* over f ∈ r(e)E^1 with Φ(efα) = a for some α ∈ r(f)E^{n−2},
    where e is the common first edge of the Φ-preimages of a. When psi is given,
    Ψ(a) must be that edge too.
    """
    n = phi.window
    preimages = [
        beta
        for v in E.vertices()
        for beta in enumerate_paths(E, v, n).sorted()
        if phi.evaluate(beta.edges) == a
    ]
    if not preimages:
        raise NoPreimage(a)
    firsts = sorted({beta.edges[0] for beta in preimages}, key=str)
    if len(firsts) != 1:
        raise AmbiguousPreimage(a, firsts)
    first = firsts[0]
    if psi is not None and psi.evaluate((a,)) != first:
        raise AmbiguousPreimage(a, [first, psi.evaluate((a,))])
    s_e = edge_isometry(E, first)
    if n == 1:
        return s_e
    seconds = sorted({beta.edges[1] for beta in preimages if beta.edges[0] == first}, key=str)
    sum_ff = total(E, (multiply(edge_isometry(E, f), ghost_edge(E, f)) for f in seconds))
    return multiply(s_e, sum_ff)


# -------------------------------
# Graph groupoid
# -------------------------------

def boundary_prepend(g: Graph, alpha: Path, gamma: BoundaryPathElement) -> BoundaryPathElement:
    """αγ"""
    if isinstance(gamma, InfinitePath):
        return InfinitePath(concat(alpha.edges, gamma.seq))
    return FinitePathAtInfiniteEmitter(alpha.then(gamma.path))


def boundary_shift(g: Graph, x: BoundaryPathElement, i: int) -> Optional[BoundaryPathElement]:
    """σ^i x; None when x is a finite path shorter than i."""
    if isinstance(x, InfinitePath):
        return InfinitePath(shift_by(x.seq, i))
    path = x.path
    if i > path.length:
        return None
    if i == path.length:
        return FinitePathAtInfiniteEmitter(Path(path.range, path.range))
    rest = path.edges[i:]
    return FinitePathAtInfiniteEmitter(Path(g.edge(rest[0]).source, path.range, rest))


def _leading_edges(x: BoundaryPathElement, i: int) -> tuple:
    if isinstance(x, InfinitePath):
        return x.seq.prefix(i)
    return x.path.edges[:i]


@dataclass(frozen=True)
class GroupoidElement:
    """(αγ, l(α) − l(β), βγ); equal elements have equal triples."""
    graph: Graph = field(compare=False, repr=False)
    alpha: Path = field(compare=False)
    beta: Path = field(compare=False)
    gamma: BoundaryPathElement = field(compare=False)
    x: BoundaryPathElement = field(init=False)
    k: int = field(init=False)
    y: BoundaryPathElement = field(init=False)

    def __post_init__(self) -> None:
        g = self.graph
        if self.alpha.range != self.beta.range:
            raise NotInGroupoid(f"r({self.alpha}) != r({self.beta})")
        if not boundary_contains(g, self.gamma) or boundary_source(g, self.gamma) != self.alpha.range:
            raise NotInGroupoid(f"{self.gamma} is not a boundary path from {self.alpha.range}")
        object.__setattr__(self, "x", boundary_prepend(g, self.alpha, self.gamma))
        object.__setattr__(self, "k", self.alpha.length - self.beta.length)
        object.__setattr__(self, "y", boundary_prepend(g, self.beta, self.gamma))

    @property
    def range_point(self) -> BoundaryPathElement:
        """r(x, k, y) = x"""
        return self.x

    @property
    def source_point(self) -> BoundaryPathElement:
        """s(x, k, y) = y"""
        return self.y

    def __str__(self) -> str:
        return f"({self.x}, {self.k}, {self.y})"


def _path_from_edges(g: Graph, start: VertexId, edges: tuple) -> Path:
    return g.path(edges) if edges else g.vertex_path(start)


def from_triple(
    g: Graph, x: BoundaryPathElement, k: int, y: BoundaryPathElement, search: Optional[int] = None
) -> GroupoidElement:
    """The element (x, k, y), found through the least i with σ^i x = σ^{i−k} y."""
    if search is None:
        sizes = [
            len(p.seq.pre) + len(p.seq.per) if isinstance(p, InfinitePath) else p.path.length
            for p in (x, y)
        ]
        search = sum(sizes) + abs(k) + 2
    for i in range(max(k, 0), max(k, 0) + search + 1):
        j = i - k
        tail = boundary_shift(g, x, i)
        if tail is None:
            break
        if tail == boundary_shift(g, y, j):
            alpha = _path_from_edges(g, boundary_source(g, x), _leading_edges(x, i))
            beta = _path_from_edges(g, boundary_source(g, y), _leading_edges(y, j))
            return GroupoidElement(g, alpha, beta, tail)
    raise NotInGroupoid(f"({x}, {k}, {y}) has no common tail")


def unit(g: Graph, x: BoundaryPathElement) -> GroupoidElement:
    start = g.vertex_path(boundary_source(g, x))
    return GroupoidElement(g, start, start, x)


def groupoid_compose(a: GroupoidElement, b: GroupoidElement) -> GroupoidElement:
    """(x, k, y) · (y, l, z) = (x, k + l, z)"""
    if a.graph is not b.graph:
        raise GraphMismatch("groupoid elements over different graphs")
    if a.source_point != b.range_point:
        raise NotComposable(f"s = {a.source_point} != {b.range_point} = r")
    return from_triple(a.graph, a.x, a.k + b.k, b.y)


def groupoid_inverse(a: GroupoidElement) -> GroupoidElement:
    """(x, k, y)^{-1} = (y, −k, x)"""
    return GroupoidElement(a.graph, a.beta, a.alpha, a.gamma)


def in_groupoid_cylinder(
    a: GroupoidElement, alpha: Path, beta: Path, excluded: Iterable[Letter] = ()
) -> bool:
    """Membership in Z(α, β, F) = {(αz, l(α) − l(β), βz) : z ∈ ∂E, s(z) = r(α), z_1 ∉ F}."""
    g = a.graph
    if alpha.range != beta.range or a.k != alpha.length - beta.length:
        return False
    if _leading_edges(a.x, alpha.length) != alpha.edges or _leading_edges(a.y, beta.length) != beta.edges:
        return False
    if boundary_source(g, a.x) != alpha.source or boundary_source(g, a.y) != beta.source:
        return False
    z = boundary_shift(g, a.x, alpha.length)
    if z is None or z != boundary_shift(g, a.y, beta.length):
        return False
    if boundary_source(g, z) != alpha.range:
        return False
    first = _leading_edges(z, 1)
    return not first or first[0] not in set(excluded)


# -------------------------------
# Maps induced by a conjugacy
# -------------------------------

def _graph_of(witness: ConjugacyWitness, side: str) -> Graph:
    presentation = getattr(witness, side)
    graph = getattr(presentation, "graph", None)
    if graph is None:
        raise UnsupportedGraph(f"the {side} of the witness is not an edge shift")
    return graph


def _letterwise(code: SlidingBlockCode, edges: tuple) -> tuple:
    images = []
    for i, e in enumerate(edges, start=1):
        block_map = code.map_for(e)
        if block_map is None or block_map.window != 1:
            raise FiniteInputUnsupported("finite paths are only mapped by window-1 codes")
        image = block_map.evaluate((e,))
        if image is None:
            raise WindowNotInDomain(i, e)
        images.append(image)
    return tuple(images)


def boundary_map_phi_tilde(
    witness: ConjugacyWitness, x: BoundaryPathElement, horizon: int = 8
) -> BoundaryPathElement:
    """
    φ̃ on the boundary path space: φ on paths of positive length, and
    v ↦ r(φ(e)) for the edges e entering an infinite emitter v.
    """
    E = _graph_of(witness, "source")
    F = _graph_of(witness, "target")
    if isinstance(x, InfinitePath):
        return InfinitePath(apply(witness.forward, x.seq))
    if x.path.length:
        return FinitePathAtInfiniteEmitter(F.path(_letterwise(witness.forward, x.path.edges)))

    v = x.path.source
    incoming = E.in_edges(v).take(horizon)
    if not incoming:
        raise NoIncomingEdge(v)
    chosen: Optional[tuple[Letter, VertexId]] = None
    for edge in incoming:
        (image,) = _letterwise(witness.forward, (edge.id,))
        end = F.edge(image).range
        if chosen is None:
            chosen = (edge.id, end)
        elif chosen[1] != end:
            raise WellDefinednessViolation(chosen[0], edge.id)
    assert chosen is not None
    return FinitePathAtInfiniteEmitter(F.vertex_path(chosen[1]))


def groupoid_map_H(witness: ConjugacyWitness, a: GroupoidElement, horizon: int = 8) -> GroupoidElement:
    """(x, k, y) ↦ (φ̃(x), k, φ̃(y))"""
    F = _graph_of(witness, "target")
    return from_triple(
        F,
        boundary_map_phi_tilde(witness, a.x, horizon),
        a.k,
        boundary_map_phi_tilde(witness, a.y, horizon),
    )

