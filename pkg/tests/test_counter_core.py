"""Tests for extended naturals, counter trees and counter values."""

import pytest
from hypothesis import given, settings, strategies as st

from core.counter_core import INFINITY, ZERO, CounterTree, ExtNat, Locus, downward_value, inc, restricted_value, \
    tail_unbounded, tr, truncation_value, value, value_tree
from core.errors import NotRootDirected, UnknownCounter
from core.tree_core import RegularTree, UPPath
from tests.oracles import brute_force_value, brute_force_values, random_counter_tree, random_finite_counter_tree, \
    random_op, random_path, seeded


def counter_tree(root, labels, children, counters=("c",)):
    return CounterTree(RegularTree(root=root, labels=labels, children=children), counters)


def downward_flow_tree():
    """Root with a child fed from the root and a child feeding the root"""
    return counter_tree("r", {
        "r": frozenset(),
        "x": frozenset({inc("c", "c", Locus.PARENT, Locus.SELF)}),
        "y": frozenset({inc("c", "c")}),
    }, {"r": ("x", "y"), "x": None, "y": None})


def test_extnat_arithmetic_and_order():
    assert INFINITY + 3 == INFINITY
    assert ExtNat(2) + 3 == 5
    assert ExtNat(2) < INFINITY
    assert not INFINITY < ExtNat(10 ** 9)
    assert max(ZERO, ExtNat(4), INFINITY).is_infinite
    assert str(INFINITY) == "inf"
    assert ExtNat.parse("inf") == INFINITY
    assert ExtNat.parse(" 7 ") == 7


def test_extnat_rejects_negative():
    with pytest.raises(ValueError):
        ExtNat(-1)
    with pytest.raises(ValueError):
        INFINITY.finite


def test_values_follow_increments_and_transfers():
    tree = downward_flow_tree()
    assert value(tree, "", "c") == 1
    assert value(tree, "0", "c") == 2
    assert value(tree, "1", "c") == 0


def test_transfer_carries_value_without_increment():
    tree = counter_tree("r", {
        "r": frozenset(),
        "x": frozenset({tr("d", "c")}),
        "xx": frozenset({inc("d", "d")}),
        "e": frozenset(),
    }, {"r": ("x", "e"), "x": ("xx", "e"), "xx": None, "e": None}, counters=("c", "d"))
    assert value(tree, "0", "d") == 1
    assert value(tree, "", "c") == 1
    assert value(tree, "", "d") == 0


def test_incrementing_cycle_is_infinite():
    tree = counter_tree("r", {
        "r": frozenset(),
        "x": frozenset({inc("c", "c"), tr("c", "c", Locus.PARENT, Locus.SELF)}),
    }, {"r": ("x", "x"), "x": None})
    assert value(tree, "", "c") == INFINITY
    assert value(tree, "0", "c") == INFINITY


def test_restricted_value_drops_banned_ancestors():
    tree = downward_flow_tree()
    assert restricted_value(tree, "0", "c", []) == 2
    assert restricted_value(tree, "0", "c", [""]) == 0
    # a node is never its own strict ancestor
    assert restricted_value(tree, "", "c", [""]) == 1


def test_unknown_counters_are_rejected():
    with pytest.raises(UnknownCounter):
        counter_tree("r", {"r": frozenset({inc("z", "z")})}, {"r": None})
    with pytest.raises(UnknownCounter):
        value(downward_flow_tree(), "", "z")


def regular_bounded_tree():
    """Spine of transfers with an incrementing leaf hanging off every spine node"""
    return counter_tree("s", {
        "s": frozenset({tr("c", "c")}),
        "l": frozenset({inc("c", "c")}),
    }, {"s": ("s", "l"), "l": None})


def test_downward_value_on_regular_tree():
    tree = regular_bounded_tree()
    assert downward_value(tree, "s", "c") == 1
    assert downward_value(tree, "l", "c") == 0
    assert not tail_unbounded(tree, UPPath("", "0"), "c")


def test_downward_value_matches_truncations():
    tree = regular_bounded_tree()
    for depth in range(1, 5):
        assert truncation_value(tree, "s", "c", depth) == downward_value(tree, "s", "c")


def test_self_feeding_loop_is_tail_unbounded():
    tree = counter_tree("x", {"x": frozenset({inc("c", "c")})}, {"x": ("x", "x")})
    assert downward_value(tree, "x", "c") == INFINITY
    assert tail_unbounded(tree, UPPath("", "0"), "c")


def test_downward_values_need_root_directed_tuples():
    tree = counter_tree("x", {"x": frozenset({inc("c", "c", Locus.PARENT, Locus.SELF)})}, {"x": ("x", "x")})
    with pytest.raises(NotRootDirected):
        downward_value(tree, "x", "c")


@settings(max_examples=500, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_value_matches_counter_path_enumeration_property(seed: int) -> None:
    """Property: configuration-graph values equal the brute-force counter-path values."""
    ctree = random_finite_counter_tree(seeded(seed), 20)
    assert value_tree(ctree) == brute_force_values(ctree)


@settings(max_examples=500, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_restricted_value_matches_enumeration_property(seed: int) -> None:
    """Property: restricted values equal the brute-force values with ancestors removed."""
    rng = seeded(seed)
    ctree = random_finite_counter_tree(rng, 20)
    addresses = [addr for addr, _ in ctree.tree.addresses()]
    addr = rng.choice(addresses)
    restriction = rng.sample(addresses, min(2, len(addresses)))
    for c in ctree.counters:
        assert restricted_value(ctree, addr, c, restriction) == brute_force_value(ctree, addr, c, restriction)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_downward_value_agrees_on_finite_presentations_property(seed: int) -> None:
    """Property: on acyclic root-directed trees the downward value is the value at every node."""
    ctree = random_counter_tree(seeded(seed), 6, root_directed=True)
    values = value_tree(ctree)
    for addr, vertex in ctree.tree.addresses():
        for c in ctree.counters:
            assert downward_value(ctree, vertex, c) == values[(addr, c)]


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_extra_tuple_never_lowers_a_value_property(seed: int) -> None:
    """Property: adding a tuple to one node can only raise counter values."""
    rng = seeded(seed)
    ctree = random_finite_counter_tree(rng, 20)
    before = value_tree(ctree)
    chosen = rng.choice(ctree.tree.vertices)
    extra = random_op(rng, ctree.counters)
    grown = CounterTree(ctree.tree.relabel(lambda v, lab: lab | {extra} if v == chosen else lab), ctree.counters)
    after = value_tree(grown)
    for key, old in before.items():
        assert after[key] >= old


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_tail_unboundedness_ignores_the_prefix_property(seed: int) -> None:
    """Property: prefixes reaching the same vertex and unrolled loops give the same answer."""
    rng = seeded(seed)
    ctree = random_counter_tree(rng, 4, root_directed=True, acyclic=False)
    path = random_path(rng, ctree.tree)
    if path is None:
        return
    tree = ctree.tree
    entry = path.loop_vertices(tree)[0]
    expected = {c: tail_unbounded(ctree, path, c) for c in ctree.counters}
    variants = [UPPath(path.prefix + path.loop, path.loop),
                UPPath(path.prefix + path.loop[0], path.loop[1:] + path.loop[0])]
    variants += [UPPath(addr, path.loop) for addr, vertex in tree.addresses(max_depth=len(tree.labels) + 1)
                 if vertex == entry]
    for variant in variants:
        for c in ctree.counters:
            assert tail_unbounded(ctree, variant, c) == expected[c]
