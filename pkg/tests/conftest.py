# tests/conftest.py
import importlib.util
from pathlib import Path

import pytest

from shiftlab.core.ckalg import GroupoidElement
from shiftlab.core.codes import BoundedCode, FirstLetterMap, HigherBlockMap
from shiftlab.core.graphs import (
    Edge,
    FanFamily,
    Graph,
    InfinitePath,
    all_paths,
    higher_block_graph,
)
from shiftlab.core.graphs import Path as GraphPath
from shiftlab.core.seqcore import Seq
from shiftlab.core.spaces import EdgeShift, PairRuleShift, hub_pairs, ray_graph

# -------------------------------
# Graph Fixtures
# -------------------------------

@pytest.fixture
def g1() -> Graph:
    """u -e-> v, v -f-> u, v -g-> v"""
    return Graph("g1", ["u", "v"], [Edge("e", "u", "v"), Edge("f", "v", "u"), Edge("g", "v", "v")])


@pytest.fixture
def g1_hb2(g1: Graph) -> Graph:
    return higher_block_graph(g1, 2)


@pytest.fixture
def ray() -> Graph:
    """v -e1-> v_1 -e2-> v_2 -> ..."""
    return ray_graph()


@pytest.fixture
def graph_h() -> Graph:
    """u -m-> w, w -l-> u, and the fan h_n: w -> w_n, h_nr: w_n -> w at w."""
    return Graph("H", ["u", "w"], [Edge("m", "u", "w"), Edge("l", "w", "u")], [FanFamily("w", "h")])


@pytest.fixture
def g1_groupoid(g1: Graph) -> list[GroupoidElement]:
    """(αγ, l(α) − l(β), βγ) on g1 for l(α), l(β) <= 2 and γ in (e.f), (f.e), (g)"""
    def paths_into(v: str) -> list[GraphPath]:
        longer = [p for n in (1, 2) for p in all_paths(g1, n).sorted() if p.range == v]
        return [g1.vertex_path(v)] + longer

    found = []
    for period in (("e", "f"), ("f", "e"), ("g",)):
        gamma = InfinitePath(Seq.periodic((), period))
        into = paths_into(g1.edge(period[0]).source)
        found.extend(GroupoidElement(g1, alpha, beta, gamma) for alpha in into for beta in into)
    return found


# -------------------------------
# Presentation and Code Fixtures
# -------------------------------

@pytest.fixture
def pairs() -> PairRuleShift:
    """a_i a_j allowed iff i = 1 or i = j"""
    return hub_pairs()


@pytest.fixture
def g1_shift(g1: Graph) -> EdgeShift:
    return EdgeShift(g1)


@pytest.fixture
def phi2() -> BoundedCode:
    return BoundedCode(HigherBlockMap(2))


@pytest.fixture
def pi2() -> BoundedCode:
    return BoundedCode(FirstLetterMap())


# -------------------------------
# Files
# -------------------------------

G1_TEXT = """\
graph g1
vertex u
vertex v
edge e u v
edge f v u
edge g v v
"""

G1_HB2_TEXT = """\
graph g1_hb2
vertex <e>
vertex <f>
vertex <g>
edge <e.f> <e> <f>
edge <e.g> <e> <g>
edge <f.e> <f> <e>
edge <g.f> <g> <f>
edge <g.g> <g> <g>
"""

PHI2_TEXT = """\
blockmap phi2 window 2
default higher-block
"""

PI2_TEXT = """\
blockmap pi2 window 1
default first-letter
"""


@pytest.fixture
def files(tmp_path: Path) -> dict[str, Path]:
    """g1.graph, g1_hb2.graph, phi2.blockmap, pi2.blockmap and presentations using them."""
    contents = {
        "g1.graph": G1_TEXT,
        "g1_hb2.graph": G1_HB2_TEXT,
        "phi2.blockmap": PHI2_TEXT,
        "pi2.blockmap": PI2_TEXT,
        "g1.shift": "shift edges g1.graph\n",
        "g1_hb2.shift": "shift edges g1_hb2.graph\n",
    }
    paths = {}
    for name, text in contents.items():
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        paths[name] = path
    return paths


if importlib.util.find_spec("pandas") is None:
    raise ImportError(
        "Missing required test dependency 'pandas'. Install it in your virtualenv:\n"
        "  pip install pandas\n"
        "or install all dev dependencies:\n"
        "  pip install -r requirements-dev.txt"
    )
