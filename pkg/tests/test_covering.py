import itertools
import re
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from kronloc.covering import (
    LocalizationDatum,
    arrow_colour,
    canonicalize,
    caterpillar,
    caterpillar_witness,
    datum_from_json,
    enumerate_localization_data,
    export_datum,
    induced_arrows,
    is_stable_colouring,
    stable_colourings,
    unit,
    weights_from_coloured_tree,
    CensusCapExceeded,
)
from kronloc.formulas import euler_tree_family
from kronloc.glueing import example_8_13
from kronloc.quiver import BipartiteQuiver, QuiverError


def test_unit_and_colour():
    assert unit(3, 2) == (0, 1, 0)
    assert arrow_colour((0, 0, 0), (0, 0, 1)) == 3
    assert arrow_colour((0, 0, 0), (1, 1, 0)) is None
    assert arrow_colour((1, 0, 0), (0, 0, 0)) is None


@pytest.mark.parametrize("m,k", [(3, 1), (3, 2), (3, 3), (4, 2), (4, 3)])
def test_star_census_counts_colour_subsets(m, k):
    # a single source with k sinks: one datum per k-subset of the colours
    rep = enumerate_localization_data(m, 1, k, type1_only=True)
    assert rep.total_chi == comb(m, k)


@pytest.mark.parametrize("d,expected", [(1, 1), (2, 3), (3, 13)])
def test_tree_family_census(d, expected):
    rep = enumerate_localization_data(3, d, 2 * d + 1, type1_only=True)
    assert rep.total_chi == expected == euler_tree_family(3, d)
    assert rep.stats["rawTreesEqualsDTimesData"]


def test_two_three_with_all_labellings():
    rep = enumerate_localization_data(3, 2, 3)
    assert rep.total_chi == 13
    assert not rep.positive_dimensional
    assert rep.stats["eulerBoundHolds"]


def test_census_cap():
    with pytest.raises(CensusCapExceeded) as exc:
        enumerate_localization_data(3, 3, 7, type1_only=True, cap=5)
    assert exc.value.partial["visited"] <= 5 + 1


def test_census_data_are_distinct_and_stable_trees():
    rep = enumerate_localization_data(3, 2, 5, type1_only=True)
    keys = [x.key() for x in rep.data]
    assert len(set(keys)) == len(keys)
    for x in rep.data:
        q = x.to_quiver()
        assert q.is_tree() and q.dimension_type == (2, 5)
        assert is_stable_colouring(q, x.colouring())


weights = st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))


@given(weights)
def test_key_is_translation_invariant(v):
    x = weights_from_coloured_tree(
        BipartiteQuiver.star(3, 2), {("i", "j1"): 1, ("i", "j2"): 3}
    )
    assert x.translate(v).key() == x.key()
    assert canonicalize(x.translate(v)) == canonicalize(x)


def test_datum_json_round_trip():
    q = example_8_13()
    c = stable_colourings(q)[0]
    x = weights_from_coloured_tree(q, c)
    assert datum_from_json(export_datum(x, "json")) == canonicalize(x)


def test_stable_colourings_are_exactly_the_injective_ones():
    q = caterpillar(3)
    found = stable_colourings(q)
    # brute force over all 3^6 colourings
    brute = [dict(zip(q.arrows, cs)) for cs in itertools.product(range(1, 4), repeat=6)
             if is_stable_colouring(q, dict(zip(q.arrows, cs)))]
    assert found == brute


def test_weights_reject_bad_colouring():
    q = BipartiteQuiver.star(3, 2)
    with pytest.raises(QuiverError):
        weights_from_coloured_tree(q, {("i", "j1"): 1, ("i", "j2"): 1})


def test_caterpillar_patterns():
    w = caterpillar_witness(3)
    assert w.induced == [("i3", "j11", 3)]
    assert w.positive_dimensional and not w.datum.merged
    v = caterpillar_witness(3, (1, 2, 3, 1, 2, 3))
    assert v.datum.merged == (("j11", ("j11", "j32")),)
    assert v.datum.dimension_type == (3, 4)


def test_example_tree_has_an_unfolded_colouring_with_valid_dot():
    q = example_8_13()
    for c in stable_colourings(q):
        x = weights_from_coloured_tree(q, c)
        if not x.merged and not induced_arrows(x, q):
            break
    else:
        pytest.fail("no colouring embeds the tree faithfully")
    dot = export_datum(x, "dot")
    assert dot.startswith("digraph datum {") and dot.rstrip().endswith("}")
    assert len(re.findall(r'^  "\w+" \[label=', dot, re.M)) == 17
    assert len(re.findall(r" -> ", dot)) == 16


def test_localization_datum_rejects_clashing_weights():
    with pytest.raises(QuiverError):
        LocalizationDatum(3, (("a", (0, 0, 0), 1), ("b", (0, 0, 0), 1)), ())
