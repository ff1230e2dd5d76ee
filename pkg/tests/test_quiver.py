import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kronloc.glueing import example_8_13
from kronloc.quiver import (
    BipartiteQuiver,
    QuiverError,
    QuiverShape,
    SweepCapExceeded,
    _destabilizing_general,
    classify_root,
    euler_form,
    find_destabilizing,
    is_generically_stable,
    kronecker_euler_form,
    kronecker_is_stable,
    kronecker_slope,
    moduli_dimension,
    normalize_kronecker,
    replay_moves,
)

pairs = st.tuples(st.integers(3, 6), st.integers(0, 40), st.integers(0, 40)).filter(
    lambda t: t[1] + t[2] > 0
)


def test_euler_form_on_kronecker_shape():
    q = QuiverShape.kronecker(3)
    assert euler_form(q, {"source": 2, "sink": 3}, {"source": 2, "sink": 3}) == kronecker_euler_form(3, 2, 3) == -5
    assert moduli_dimension(q, {"source": 2, "sink": 3}) == 6


def test_slope():
    assert kronecker_slope(2, 3) == Fraction(2, 5)
    with pytest.raises(QuiverError):
        kronecker_slope(0, 0)


@given(pairs)
def test_normal_form_replays_and_keeps_euler_form(p):
    m, d, e = p
    rep, moves = normalize_kronecker((m, d, e))
    assert replay_moves(m, d, e, moves) == (rep.d, rep.e)
    assert kronecker_euler_form(m, d, e) == kronecker_euler_form(m, rep.d, rep.e)
    assert all(a != b or a != "swap" for a, b in zip(moves, moves[1:]))


@given(pairs)
def test_classification_matches_euler_form(p):
    m, d, e = p
    kind = classify_root(p)
    q = kronecker_euler_form(m, d, e)
    if kind == "real":
        assert q == 1
    elif kind == "imaginary":
        assert q <= 0


def test_simple_cases():
    assert classify_root((3, 1, 0)) == "real"
    assert classify_root((3, 1, 3)) == "real"
    assert classify_root((3, 1, 2)) == "imaginary"
    assert classify_root((3, 2, 1)) == "imaginary"
    assert classify_root((3, 1, 4)) == "not-a-root"


@pytest.mark.parametrize("m,d,e,stable", [
    (3, 1, 2, True), (3, 2, 3, True), (3, 3, 5, True), (3, 1, 3, True),
    (3, 2, 2, True), (3, 1, 4, False), (3, 2, 7, False), (4, 2, 6, True), (2, 2, 2, False),
])
def test_kronecker_stability(m, d, e, stable):
    assert kronecker_is_stable(m, d, e) is stable


def test_equal_slope_is_semistable_not_stable():
    # (1,1) sits inside the general (2,2) representation of K(2)
    assert not kronecker_is_stable(2, 2, 2)
    assert kronecker_is_stable(2, 2, 2, strict=False)


def test_star_and_disconnected():
    assert is_generically_stable(BipartiteQuiver.star(3, 3))
    two = BipartiteQuiver(3, ["a", "b"], ["x", "y"], [("a", "x"), ("b", "y")],
                          {"a": 1, "b": 1, "x": 1, "y": 1})
    wit = find_destabilizing(two)
    assert wit is not None and 0 < sum(wit.values()) < 4


def test_example_tree_is_stable():
    q = example_8_13()
    assert q.dimension_type == (8, 13)
    assert q.is_tree() and len(q.vertices) == 17
    assert is_generically_stable(q)


def test_json_round_trip_and_schema_errors():
    q = example_8_13()
    assert BipartiteQuiver.from_json(q.to_json()) == q
    bad = json.loads(q.to_json())
    bad["arrows"].append(["a", "nowhere"])
    with pytest.raises(QuiverError):
        BipartiteQuiver.from_json_obj(bad)


def test_sweep_cap():
    with pytest.raises(SweepCapExceeded):
        find_destabilizing(example_8_13(), cap=10)


def _oracle(q: BipartiteQuiver, strict: bool):
    idx = {v: t for t, v in enumerate(q.vertices)}
    arrows = [(idx[i], idx[j]) for i, j in q.arrows]
    alpha = tuple(q.dims[v] for v in q.vertices)
    theta = [1 if v in q.sources else 0 for v in q.vertices]
    return _destabilizing_general(len(alpha), arrows, alpha, theta, strict, 10**7)


@st.composite
def small_quivers(draw):
    ns = draw(st.integers(1, 3))
    nt = draw(st.integers(1, 3))
    src = [f"i{t}" for t in range(ns)]
    snk = [f"j{t}" for t in range(nt)]
    pairs_ = list(itertools.product(src, snk))
    arrows = draw(st.lists(st.sampled_from(pairs_), unique=True, max_size=len(pairs_)))
    dims = {v: draw(st.integers(1, 3)) for v in src + snk}
    return BipartiteQuiver(3, src, snk, arrows, dims)


@settings(max_examples=120, deadline=None)
@given(small_quivers(), st.booleans())
def test_sweep_agrees_with_schofield_recursion(q, strict):
    assert (find_destabilizing(q, strict) is None) == (_oracle(q, strict) is None)


@settings(max_examples=60, deadline=None)
@given(small_quivers())
def test_witness_really_destabilizes(q):
    wit = find_destabilizing(q)
    if wit is None:
        return
    d = sum(wit[i] for i in q.sources)
    tot = sum(wit.values())
    big_d = sum(q.dims[i] for i in q.sources)
    big_t = sum(q.dims.values())
    assert 0 < tot < big_t or (tot == big_t and wit != q.dims)
    assert d * big_t >= big_d * tot
