# tests/unit/test_topology.py
import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftlab.core.errors import DisjointnessViolation, NotInfinite
from shiftlab.core.seqcore import EMPTY_SEQ, Seq, Symbol, concat, shift, symbols
from shiftlab.core.topology import (
    ENUMERATION,
    ZERO_DISTANCE,
    CylinderSpec,
    Dyadic,
    alpha_coordinate,
    check_convergence,
    common_prefix_length,
    cylinder_contains,
    cylinder_intersection,
    in_basic_open,
    metric_D,
    metric_dA,
    shell,
)

a1, a2, a3 = symbols(1, 2, 3)

letters = st.integers(min_value=1, max_value=4).map(Symbol)
words = st.lists(letters, max_size=4).map(tuple)
infinite_seqs = st.builds(Seq.periodic, words, st.lists(letters, min_size=1, max_size=3).map(tuple))
seqs = st.one_of(words.map(Seq.finite), infinite_seqs)


# -------------------------------
# Enumeration
# -------------------------------

def test_enumeration_starts_as_documented():
    listing = [ENUMERATION.word_at(n) for n in range(1, 9)]
    assert listing == [(), (a1,), (a2,), (a1, a1), (a1, a2), (a2, a1), (a2, a2), (a3,)]


@pytest.mark.parametrize("n", range(1, 400, 7))
def test_enumeration_is_a_bijection(n):
    assert ENUMERATION.index(ENUMERATION.word_at(n)) == n


@given(words)
def test_index_inverts_word_at(w):
    assert ENUMERATION.word_at(ENUMERATION.index(w)) == w


def test_shell_rejects_graph_letters():
    assert shell((a1, a3)) == 3
    with pytest.raises(ValueError):
        shell(("e",))


# -------------------------------
# Cylinders
# -------------------------------

def test_cylinder_intersection_trichotomy():
    assert cylinder_intersection((a1,), (a1, a2)) == CylinderSpec((a1, a2))
    assert cylinder_intersection((a1, a2), (a1,)) == CylinderSpec((a1, a2))
    assert cylinder_intersection((a1, a2), (a2,)) is None
    assert cylinder_intersection((), (a2,)) == CylinderSpec((a2,))


def test_generalized_cylinder_excludes_next_symbol():
    c = CylinderSpec((a1,), frozenset({a2}))
    assert cylinder_contains(c, Seq.finite((a1,)))
    assert cylinder_contains(c, Seq.periodic((a1,), (a3,)))
    assert not cylinder_contains(c, Seq.periodic((a1,), (a2,)))
    assert not cylinder_contains(c, Seq.finite((a2,)))


@given(seqs, words, words)
def test_basic_open_matches_alpha_coordinates(x, u, v):
    if u == v:
        with pytest.raises(DisjointnessViolation):
            in_basic_open(x, [u], [v])
        return
    expected = alpha_coordinate(x, u) == 1 and alpha_coordinate(x, v) == 0
    assert in_basic_open(x, [u], [v]) == expected


# -------------------------------
# Metrics
# -------------------------------

def test_dyadic_ordering_and_value():
    assert Dyadic(3) < Dyadic(2)
    assert ZERO_DISTANCE < Dyadic(100)
    assert Dyadic(2).value == Fraction(1, 4)
    assert Dyadic(1) + Dyadic(2) == Fraction(3, 4)
    assert str(Dyadic(5)) == "1/2^5"


@given(seqs, seqs)
def test_dA_is_symmetric_and_zero_only_on_the_diagonal(x, y):
    assert metric_dA(x, y) == metric_dA(y, x)
    assert (metric_dA(x, y) == ZERO_DISTANCE) == (x == y)


@given(seqs, seqs, seqs)
def test_dA_is_an_ultrametric(x, y, z):
    assert metric_dA(x, z) <= max(metric_dA(x, y), metric_dA(y, z))


def test_dA_compares_through_first_distinguishing_word():
    x = Seq.periodic((a1,), (a2,))
    y = Seq.finite((a1,))
    assert common_prefix_length(x, y) == 1
    assert metric_dA(x, y) == Dyadic(ENUMERATION.index((a1, a2)))


def test_boundedness_metric():
    x = Seq.periodic((a1, a2), (a3,))
    y = Seq.periodic((a1, a3), (a3,))
    assert metric_D(x, y) == Dyadic(2)
    assert metric_D(x, x) == ZERO_DISTANCE
    with pytest.raises(NotInfinite):
        metric_D(x, Seq.finite((a1,)))


@given(infinite_seqs, infinite_seqs, words)
def test_D_is_shift_compatible(x, y, w):
    """Prefixing a common word moves the first disagreement by its length."""
    if x == y:
        return
    before = metric_D(x, y).exponent
    assert metric_D(concat(w, x), concat(w, y)).exponent == before + len(w)


def infinite_pool():
    heads = [w for k in range(4) for w in itertools.product((a1, a2), repeat=k)]
    tails = [w for k in (1, 2) for w in itertools.product((a1, a2), repeat=k)]
    return sorted({Seq.periodic(h, t) for h in heads for t in tails}, key=str)


def test_D_is_an_ultrametric_on_a_pool():
    pool = infinite_pool()
    assert len(pool) >= 30
    pool = pool[:30]
    for x, y, z in itertools.product(pool, repeat=3):
        assert metric_D(x, z) <= max(metric_D(x, y), metric_D(y, z))
        assert metric_D(x, z).value <= metric_D(x, y) + metric_D(y, z)


@given(infinite_seqs, infinite_seqs, infinite_seqs)
def test_D_is_an_ultrametric(x, y, z):
    assert metric_D(x, y) == metric_D(y, x)
    assert metric_D(x, z) <= max(metric_D(x, y), metric_D(y, z))


# -------------------------------
# Convergence
# -------------------------------

def test_convergence_to_finite_limit():
    family = [concat((a1,), Seq.periodic((), (Symbol(n),))) for n in range(1, 11)]
    report = check_convergence(family, Seq.finite((a1,)), depth_M=3, test_F=[a2, a3])
    assert report.holds
    assert report.tail_start == 3
    assert report.family_size == 10


def test_convergence_to_infinite_limit_uses_depth():
    limit = Seq.periodic((), (a1,))
    family = [concat((a1,) * n, Seq.periodic((), (a2,))) for n in range(1, 6)]
    assert check_convergence(family, limit, depth_M=3).tail_start == 2
    assert not check_convergence(family, limit, depth_M=6).holds


def test_convergence_needs_a_family():
    with pytest.raises(ValueError):
        check_convergence([], Seq.finite(()), 1)


@given(
    infinite_seqs,
    st.integers(min_value=1, max_value=4),
    st.lists(st.tuples(words, infinite_seqs), min_size=1, max_size=6),
)
def test_tail_of_a_convergent_family_is_close_in_dA(x, depth, members):
    family = [concat(head, y) for head, y in members]
    family += [concat(x.prefix(depth + k), y) for k, (_, y) in enumerate(members)]
    report = check_convergence(family, x, depth_M=depth)
    assert report.holds
    bound = Dyadic(ENUMERATION.index(x.prefix(depth)))
    for xn in family[report.tail_start:]:
        assert metric_dA(xn, x) <= bound


def test_shift_is_not_continuous_at_the_empty_sequence():
    family = [Seq.periodic((Symbol(n),), (a1,)) for n in range(1, 12)]
    assert check_convergence(family, EMPTY_SEQ, depth_M=1, test_F=[a1, a2, a3]).holds
    distances = [metric_dA(x, EMPTY_SEQ) for x in family[1:]]
    assert all(later < earlier for earlier, later in zip(distances, distances[1:]))

    shifted = [shift(x) for x in family]
    assert set(shifted) == {Seq.periodic((), (a1,))}
    assert shift(EMPTY_SEQ) == EMPTY_SEQ
    assert not check_convergence(shifted, shift(EMPTY_SEQ), depth_M=1, test_F=[a1]).holds
    assert len({metric_dA(x, EMPTY_SEQ) for x in shifted}) == 1
