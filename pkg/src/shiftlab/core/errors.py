"""
Exception hierarchy for shiftlab.

Every failure a library call can raise derives from ShiftLabError, so callers
(the CLI in particular) can catch one type and still report the specific cause.
Outcomes that are answers rather than failures (refutations, partial
memberships, witnesses) are returned as values and never raised.
"""

from typing import Any, Optional


class ShiftLabError(Exception):
    """Base class for all shiftlab errors"""


class ConfigError(ShiftLabError):
    """Invalid environment configuration"""

    def __init__(self, variable: str, value: str) -> None:
        super().__init__(f"invalid value for {variable}: {value!r}")
        self.variable = variable
        self.value = value


class ParseError(ShiftLabError):
    """Malformed input text; carries the 1-based line number when known"""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line
        self.message = message


# seqcore / topology

class OutOfRange(ShiftLabError):
    """A subblock window runs past the end of a finite sequence"""


class DisjointnessViolation(ShiftLabError):
    """The word sets F and G of a basic open set share a word"""


class NotInfinite(ShiftLabError):
    """The boundedness metric was given a finite sequence"""


# graphs

class UnknownVertex(ShiftLabError):
    def __init__(self, vertex: Any) -> None:
        super().__init__(f"unknown vertex: {vertex}")
        self.vertex = vertex


class UnknownEdge(ShiftLabError):
    def __init__(self, edge: Any) -> None:
        super().__init__(f"unknown edge: {edge}")
        self.edge = edge


class InvalidPath(ShiftLabError):
    """Consecutive edges do not meet: r(e_i) != s(e_{i+1})"""


class HasSink(ShiftLabError):
    """Edge shifts are only defined for graphs without sinks"""

    def __init__(self, vertex: Any) -> None:
        super().__init__(f"graph has a sink at vertex {vertex}")
        self.vertex = vertex


class NotRowFinite(ShiftLabError):
    """The operation needs a row-finite graph or shift space"""


# spaces

class EmptyPresentation(ShiftLabError):
    """A forbidden-block set containing the empty word presents the empty space"""


class BlockTooLong(ShiftLabError):
    def __init__(self, word: Any, limit: int) -> None:
        super().__init__(f"block {word} is longer than {limit}")
        self.word = word
        self.limit = limit


class NotAMember(ShiftLabError):
    def __init__(self, item: Any) -> None:
        super().__init__(f"{item} is not a member of the shift space")
        self.item = item


# codes

class WindowNotInDomain(ShiftLabError):
    def __init__(self, position: int, window: Any = None) -> None:
        super().__init__(f"window at position {position} is outside the block map domain: {window}")
        self.position = position
        self.window = window


class FiniteInputUnsupported(ShiftLabError):
    """Sliding block codes act on infinite sequences and the empty sequence only"""


class ImageNotInDomain(ShiftLabError):
    def __init__(self, word: Any) -> None:
        super().__init__(f"image word {word} is outside the second block map's domain")
        self.word = word


# ckalg

class GraphMismatch(ShiftLabError):
    """Algebra elements over different graphs were combined"""


class UnsupportedGraph(ShiftLabError):
    """Symbolic equality needs a finite graph with no sinks"""


class WindowMismatch(ShiftLabError):
    """A block map cannot be evaluated on the paths its window requires"""


class NoPreimage(ShiftLabError):
    def __init__(self, edge: Any) -> None:
        super().__init__(f"edge {edge} is not in the image of the block map")
        self.edge = edge


class AmbiguousPreimage(ShiftLabError):
    """The block-map preimages of an edge do not determine a single first edge"""

    def __init__(self, edge: Any, first_edges: Any) -> None:
        super().__init__(f"preimages of {edge} start with {first_edges}, not one common edge")
        self.edge = edge
        self.first_edges = first_edges


class NotComposable(ShiftLabError):
    """The range of the left groupoid element differs from the source of the right"""


class NotInGroupoid(ShiftLabError):
    """A triple (x, k, y) that is not of the form (αγ, l(α) − l(β), βγ)"""


class WellDefinednessViolation(ShiftLabError):
    def __init__(self, first: Any, second: Any) -> None:
        super().__init__(f"incoming edges {first} and {second} map to different vertices")
        self.first = first
        self.second = second


class NoIncomingEdge(ShiftLabError):
    def __init__(self, vertex: Any) -> None:
        super().__init__(f"vertex {vertex} has no incoming edge within the horizon")
        self.vertex = vertex
