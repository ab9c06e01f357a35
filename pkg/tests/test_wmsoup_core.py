"""Tests for WMSO+UP automata: run acceptance, semi-emptiness and partial runs."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from core.counter_core import Locus, downward_values, inc, tail_unbounded, tr
from core.errors import NotRootDirected, PropertyAViolated
from core.lar import lift_run, normalize, project_run
from core.parity_core import ParityAutomaton, membership, run_state
from core.tree_core import RegularTree, UPPath
from core.wmsoup_core import RejectReason, WmsoUpAutomaton, accept_run, candidate_runs, check_property_a, \
    counter_free_reduct, counterops_tree, partial_run_automaton, partial_run_in, semi_empty
from tests.oracles import random_wmsoup_automaton, seeded


def loop_tree():
    return RegularTree(root="t", labels={"t": "a"}, children={"t": ("t", "t")})


def loop_run(state="p"):
    return RegularTree(root="x", labels={"x": ("a", state)}, children={"x": ("x", "x")})


def single_state(accepting=True, **counters):
    parity = ParityAutomaton(states=("p",), initial="p", accepting={"p"} if accepting else set(),
                             delta0={("p", "a")}, delta2={("p", "a", "p", "p")}, name="single")
    return WmsoUpAutomaton(parity=parity, **counters)


def test_unbounded_counter_incremented_everywhere_accepts():
    aut = single_state(unbounded=("u",), ops={"p": {inc("u", "u")}}, check={"p": {"u"}})
    assert accept_run(aut, loop_tree(), loop_run()).accepted


def test_checked_counter_without_increments_rejects():
    aut = single_state(unbounded=("u",), check={"p": {"u"}})
    verdict = accept_run(aut, loop_tree(), loop_run())
    assert not verdict.accepted
    assert verdict.reason is RejectReason.UNBOUNDEDNESS
    assert verdict.counter == "u"
    assert verdict.path == UPPath("", "0")
    assert verdict.describe() == "reject(unboundedness, counter u, path :0)"


def test_unchecked_counter_is_unconstrained():
    aut = single_state(unbounded=("u",))
    assert accept_run(aut, loop_tree(), loop_run()).accepted


def test_bounded_counter_must_stay_bounded():
    aut = single_state(bounded=("b",), ops={"p": {inc("b", "b")}})
    verdict = accept_run(aut, loop_tree(), loop_run())
    assert verdict.reason is RejectReason.BOUNDEDNESS
    cut = single_state(bounded=("b",), ops={"p": {inc("b", "b")}}, cut={"p": {"b"}})
    assert accept_run(cut, loop_tree(), loop_run()).accepted


def test_parity_rejection_names_the_state():
    verdict = accept_run(single_state(accepting=False), loop_tree(), loop_run())
    assert verdict.reason is RejectReason.PARITY
    assert verdict.state == "p"


def test_letter_and_initial_mismatches():
    aut = single_state()
    other = RegularTree(root="t", labels={"t": "b"}, children={"t": ("t", "t")})
    assert accept_run(aut, other, loop_run()).reason is RejectReason.LETTER
    wrong_start = RegularTree(root="x", labels={"x": ("a", "z")}, children={"x": ("x", "x")})
    assert accept_run(aut, loop_tree(), wrong_start).reason is RejectReason.INITIAL


def test_non_root_directed_tuples_are_refused():
    aut = single_state(unbounded=("u",), ops={"p": {inc("u", "u", Locus.PARENT, Locus.SELF)}})
    with pytest.raises(NotRootDirected):
        accept_run(aut, loop_tree(), loop_run())


def test_bounded_counters_must_be_separated():
    aut = single_state(bounded=("b",), unbounded=("u",), ops={"p": {tr("b", "u")}})
    with pytest.raises(PropertyAViolated):
        check_property_a(aut)
    with pytest.raises(PropertyAViolated):
        accept_run(aut, loop_tree(), loop_run())


def test_counterops_tree_relabels_run():
    aut = single_state(unbounded=("u",), ops={"p": {inc("u", "u")}})
    ctree = counterops_tree(aut, loop_run())
    assert ctree.ops("x") == frozenset({inc("u", "u")})


def test_counter_free_reduct_forgets_counters():
    aut = single_state(bounded=("b",), ops={"p": {inc("b", "b")}})
    assert counter_free_reduct(aut) is aut.parity
    assert membership(counter_free_reduct(aut), loop_tree()).accepted


def test_unbounded_tuples_may_point_downwards_in_the_normal_form():
    aut = single_state(bounded=("b",), unbounded=("u",), ops={"p": {inc("u", "u", Locus.PARENT, Locus.SELF)}})
    check_property_a(aut)
    assert normalize(aut).automaton.counters == ("b", "u")


def test_bounded_tuples_must_be_root_directed():
    aut = single_state(bounded=("b",), ops={"p": {inc("b", "b", Locus.PARENT, Locus.SELF)}})
    with pytest.raises(PropertyAViolated):
        check_property_a(aut)
    with pytest.raises(PropertyAViolated):
        normalize(aut)


def test_unboundedness_cycle_replays_without_growth():
    aut = single_state(unbounded=("u",), check={"p": {"u"}})
    verdict = accept_run(aut, loop_tree(), loop_run())
    assert verdict.reason is RejectReason.UNBOUNDEDNESS
    assert not tail_unbounded(counterops_tree(aut, loop_run()), verdict.path, "u")


def test_semi_empty_finds_leaf_witness():
    result = semi_empty(single_state(accepting=False), 4)
    assert result.nonempty
    assert accept_run(single_state(accepting=False), result.tree, result.run).accepted


def test_semi_empty_finds_looping_witness():
    aut = WmsoUpAutomaton(
        parity=ParityAutomaton(states=("p",), initial="p", accepting={"p"}, delta0=(),
                               delta2={("p", "a", "p", "p")}),
        unbounded=("u",), ops={"p": {inc("u", "u")}}, check={"p": {"u"}})
    result = semi_empty(aut, 1)
    assert result.nonempty
    assert len(result.run.vertices) == 1


def test_semi_empty_gives_up_on_empty_language():
    aut = WmsoUpAutomaton(parity=ParityAutomaton(states=("p",), initial="p", accepting=(), delta0=(),
                                                 delta2={("p", "a", "p", "p")}))
    result = semi_empty(aut, 3)
    assert not result.nonempty
    assert result.explored > 0


def test_semi_empty_lets_both_children_share_a_new_vertex():
    aut = WmsoUpAutomaton(parity=ParityAutomaton(states=("p", "q"), initial="p", accepting=(),
                                                 delta0={("q", "a")}, delta2={("p", "a", "q", "q")}))
    result = semi_empty(aut, 2)
    assert result.nonempty
    assert len(result.run.vertices) == 2
    assert accept_run(aut, result.tree, result.run).accepted


def test_partial_runs_ignore_leaf_transitions():
    aut = WmsoUpAutomaton(parity=ParityAutomaton(states=("p", "q"), initial="p", accepting={"q"},
                                                 delta0=(), delta2={("p", "a", "q", "q"), ("q", "a", "q", "q")}))
    partial = RegularTree(root=0, labels={0: ("a", "p"), 1: ("a", "q")}, children={0: (1, 1), 1: None})
    assert partial_run_in(aut, partial)
    assert partial_run_in(aut, partial, bound="p")
    looping = RegularTree(root=0, labels={0: ("a", "q")}, children={0: (0, 0)})
    assert partial_run_in(aut, looping, bound="q")
    assert not partial_run_in(aut, looping, bound="q", starred=True)
    assert not partial_run_in(aut, looping, bound="p")


def test_partial_run_automaton_accepts_partial_runs():
    aut = WmsoUpAutomaton(parity=ParityAutomaton(states=("p", "q"), initial="p", accepting={"q"},
                                                 delta0=(), delta2={("p", "a", "q", "q"), ("q", "a", "q", "q")}))
    partial = RegularTree(root=0, labels={0: ("a", "q"), 1: ("a", "q")}, children={0: (1, 1), 1: None})
    assert membership(partial_run_automaton(aut), partial).accepted
    broken = RegularTree(root=0, labels={0: ("a", "q"), 1: ("a", "p")}, children={0: (1, 1), 1: None})
    assert not membership(partial_run_automaton(aut), broken).accepted


def alternating_counter_automaton(checked):
    parity = ParityAutomaton(states=("p", "q"), initial="p", accepting={"q"}, delta0={("q", "b")},
                             delta2={("p", "a", "q", "q"), ("q", "a", "p", "p")}, name="alt")
    return WmsoUpAutomaton(parity=parity, unbounded=("u",), ops={"q": {inc("u", "u")}},
                           check={"p": {"u"}} if checked else {})


def alternating_run():
    return RegularTree(root="x", labels={"x": ("a", "p"), "y": ("a", "q")},
                       children={"x": ("y", "y"), "y": ("x", "x")})


@pytest.mark.parametrize("checked", [True, False])
def test_normal_form_preserves_acceptance(checked):
    aut = alternating_counter_automaton(checked)
    run = alternating_run()
    normal = normalize(aut)
    lifted = lift_run(normal, run)
    assert accept_run(normal.automaton, loop_tree(), lifted).accepted == accept_run(aut, loop_tree(), run).accepted
    projected = project_run(lifted)
    for (vertex, _), label in projected.labels.items():
        assert label == run.label(vertex)


@settings(max_examples=25, deadline=None)
@given(bound=st.integers(min_value=1, max_value=3), accepting=st.booleans())
def test_semi_empty_witnesses_pass_acceptance_property(bound: int, accepting: bool) -> None:
    """Property: any semi-emptiness witness is accepted, also after normalization."""
    aut = alternating_counter_automaton(accepting)
    result = semi_empty(aut, bound)
    if not result.nonempty:
        return
    assert accept_run(aut, result.tree, result.run).accepted
    normal = normalize(aut)
    assert accept_run(normal.automaton, result.tree, lift_run(normal, result.run)).accepted


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000), bound=st.integers(min_value=1, max_value=3))
def test_random_semi_empty_witnesses_survive_normalization_property(seed: int, bound: int) -> None:
    """Property: witnesses found for random automata are accepted, also lifted to the normal form."""
    aut = random_wmsoup_automaton(seeded(seed))
    result = semi_empty(aut, bound)
    if not result.nonempty:
        return
    assert accept_run(aut, result.tree, result.run).accepted
    normal = normalize(aut)
    assert accept_run(normal.automaton, result.tree, lift_run(normal, result.run)).accepted


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000), bound=st.integers(min_value=1, max_value=2))
def test_semi_empty_is_monotone_in_the_bound_property(seed: int, bound: int) -> None:
    """Property: a witness within n vertices is also found with room for n + 1."""
    aut = random_wmsoup_automaton(seeded(seed))
    if semi_empty(aut, bound).nonempty:
        assert semi_empty(aut, bound + 1).nonempty


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_unboundedness_rejections_replay_along_their_path_property(seed: int) -> None:
    """Property: the reported cycle checks the counter and never reaches an infinite value where it checks."""
    aut = random_wmsoup_automaton(seeded(seed))
    for labels, children in itertools.islice(candidate_runs(aut, 2), 200):
        run = RegularTree(root=0, labels=dict(labels), children=dict(children))
        verdict = accept_run(aut, run.relabel(lambda v, lab: lab[0]), run)
        if verdict.reason is not RejectReason.UNBOUNDEDNESS:
            continue
        c = verdict.counter
        ctree = counterops_tree(aut, run)
        values = downward_values(ctree, [c])
        loop = verdict.path.loop_vertices(run)
        assert set(loop) == set(verdict.cycle)
        checking = [v for v in loop if c in aut.checks(run_state(run, v))]
        assert checking
        assert not any(values[(v, c)].is_infinite for v in checking)
        if not any(values[(v, c)].is_infinite for v in loop):
            assert not tail_unbounded(ctree, verdict.path, c)
