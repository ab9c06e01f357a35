"""Tests for generalized automata, profile games, cost formulas and transition levels."""

import pytest
from hypothesis import given, settings, strategies as st

from core.chain_games import BOTTOM, STATE_COLOR, AutomatonChain, CostFormulaContext, GeneralizedAutomaton, \
    Profile, acceptance, check_rq_transition, eval_cost_alpha, eval_cost_beta, extract_factor, profile_game, \
    profile_game_winner, rq_chain, transition_profiles, verify_generalized_run
from core.counter_core import INFINITY, ExtNat, inc
from core.errors import MalformedTransition, NotNormalForm
from core.lar import normalize
from core.parity_core import ParityAutomaton, Player
from core.tree_core import RegularTree
from core.wmsoup_core import WmsoUpAutomaton
from tests.oracles import brute_force_acceptance, random_generalized_automaton, seeded


# Generalized automata
def looping_transitions():
    start = RegularTree(root="r", labels={"r": ("a", None), "l": ("a", "q"), "m": ("b", None)},
                        children={"r": ("l", "m"), "l": None, "m": None})
    again = RegularTree(root="r", labels={"r": ("a", "q"), "l": ("a", "q"), "m": ("b", None)},
                        children={"r": ("l", "m"), "l": None, "m": None})
    return start, again


def looping_automaton(accepting=True):
    return GeneralizedAutomaton(states=("q",), accepting={"q"} if accepting else set(),
                                transitions=looping_transitions(), name="looping")


def test_acceptance_unfolds_a_valid_run():
    gen = looping_automaton()
    result = acceptance(gen)
    assert result.accepted
    assert verify_generalized_run(gen, result.run)
    assert len(result.factors) == 2


def test_rejecting_color_loses_the_acceptance_game():
    result = acceptance(looping_automaton(accepting=False))
    assert not result.accepted
    assert result.run is None


def test_run_with_colored_root_is_not_verified():
    gen = looping_automaton()
    _, again = looping_transitions()
    assert not verify_generalized_run(gen, again)


def test_factor_stops_at_colored_nodes():
    gen = looping_automaton()
    run = acceptance(gen).run
    factor = extract_factor(run, run.root)
    assert {factor.label(v) for v in factor.vertices} == {("a", None), ("a", "q"), ("b", None)}


def test_malformed_transitions():
    interior = RegularTree(root="r", labels={"r": ("a", None), "x": ("a", "q"), "y": ("a", None)},
                           children={"r": ("x", "y"), "x": ("y", "y"), "y": None})
    with pytest.raises(MalformedTransition):
        GeneralizedAutomaton(states=("q",), accepting=(), transitions=(interior,))
    start, _ = looping_transitions()
    with pytest.raises(MalformedTransition):
        GeneralizedAutomaton(states=("p",), accepting=(), transitions=(start,))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_acceptance_matches_choice_enumeration_property(seed: int) -> None:
    """Property: the acceptance game is won iff some positional choice of transitions unfolds into a verified run."""
    gen = random_generalized_automaton(seeded(seed))
    result = acceptance(gen)
    assert result.accepted == brute_force_acceptance(gen)
    if result.accepted:
        assert verify_generalized_run(gen, result.run)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_profile_game_agrees_with_acceptance_on_one_letter_property(seed: int) -> None:
    """Property: over a single base letter the profile game and the acceptance game have the same winner."""
    gen = random_generalized_automaton(seeded(seed), letters=("a",))
    winner = profile_game_winner(transition_profiles(gen), gen.states, gen.accepting)
    assert (winner is Player.AUTOMATON) == acceptance(gen).accepted


# Profiles
def test_transition_profiles():
    profiles = transition_profiles(looping_automaton())
    assert profiles == {Profile(None, frozenset({"q"})), Profile("q", frozenset({"q"}))}
    assert str(Profile(None, frozenset({"q"}))) == "- {q}"


def test_profile_game_follows_the_acceptance_game():
    profiles = transition_profiles(looping_automaton())
    assert profile_game_winner(profiles, ("q",), {"q"}) is Player.AUTOMATON
    assert profile_game_winner(profiles, ("q",), set()) is Player.PATHFINDER


def test_profile_game_offers_every_state_of_a_set():
    profiles = {Profile(None, frozenset({"p", "q"})), Profile("q", frozenset({"q"}))}
    game = profile_game(profiles, ("p", "q"), {"q"})
    assert set(game.successors(("set", frozenset({"p", "q"})))) == {("state", "p"), ("state", "q")}
    # Pathfinder escapes to p, which has no transition
    assert profile_game_winner(profiles, ("p", "q"), {"q"}) is Player.PATHFINDER
    assert BOTTOM in game.positions


# Cost formulas
def counting_automaton():
    parity = ParityAutomaton(states=("p",), initial="p", accepting={"p"}, delta0={("p", "a")},
                             delta2={("p", "a", "p", "p")}, name="counting")
    return WmsoUpAutomaton(parity=parity, bounded=("b",), unbounded=("u",),
                           ops={"p": {inc("b", "b"), inc("u", "u")}}, check={"p": {"u"}})


def candidate(state, root_color=None, leaf_color=STATE_COLOR):
    return RegularTree(root="r", labels={"r": (("a", state), root_color), "x": (("a", state), leaf_color),
                                         "y": (("a", state), None)},
                       children={"r": ("x", "y"), "x": None, "y": None})


def test_cost_formulas_on_a_small_transition():
    normal = normalize(counting_automaton())
    state = normal.automaton.parity.initial
    ctx = CostFormulaContext(normal, state)
    assert ctx.larcheck == frozenset({"u"})
    assert eval_cost_alpha(candidate(state), ctx) == ExtNat(1)
    assert eval_cost_beta(candidate(state), ctx) == INFINITY
    assert eval_cost_beta(candidate(state, root_color=STATE_COLOR), ctx) == ExtNat(1)


def mixed_automaton():
    """p increments both counters and checks u; s increments u and cuts b"""
    parity = ParityAutomaton(states=("p", "s"), initial="p", accepting={"p", "s"},
                             delta0={("p", "a"), ("s", "a")}, delta2={("p", "a", "p", "s"), ("s", "a", "p", "s")},
                             name="mixed")
    return WmsoUpAutomaton(parity=parity, bounded=("b",), unbounded=("u",),
                           ops={"p": {inc("b", "b"), inc("u", "u")}, "s": {inc("u", "u")}},
                           cut={"s": {"b"}}, check={"p": {"u"}})


def shaped_run(shape, states):
    """Run from nested (state, colored, children) triples, vertices named by address"""
    labels, children = {}, {}

    def place(addr, node):
        state, colored, kids = node
        labels[addr] = (("a", states[state]), STATE_COLOR if colored else None)
        children[addr] = (addr + "0", addr + "1") if kids else None
        for side, kid in zip("01", kids):
            place(addr + side, kid)

    place("", shape)
    return RegularTree(root="", labels=labels, children=children)


def leaf(state, colored=False):
    return (state, colored, ())


COST_CASES = [
    (("P", False, (leaf("P", True), leaf("P"))), ExtNat(1), INFINITY),
    (("P", True, (leaf("P", True), leaf("P"))), ExtNat(1), ExtNat(1)),
    (("P", True, (("P", False, (leaf("P", True), leaf("P"))), leaf("P"))), ExtNat(2), ExtNat(2)),
    (("S", True, (leaf("P", True), leaf("P"))), ExtNat(1), ExtNat(0)),
    (("P", True, (("S", False, (leaf("P", True), leaf("P"))), leaf("P"))), ExtNat(1), ExtNat(2)),
    (("S", True, (("P", False, (leaf("P", True), leaf("P"))),
                  ("P", False, (("P", False, (leaf("P", True), leaf("P"))), leaf("P"))))), ExtNat(3), ExtNat(1)),
    (("P", True, (leaf("P"), leaf("P"))), ExtNat(1), INFINITY),
    (leaf("P", True), ExtNat(0), INFINITY),
    (("P", True, (leaf("S", True), leaf("S"))), ExtNat(0), ExtNat(1)),
    (("P", False, (("P", False, (("P", False, (leaf("P"), leaf("P"))), leaf("P"))), leaf("P"))),
     ExtNat(3), INFINITY),
]


@pytest.mark.parametrize("shape,alpha,beta", COST_CASES)
def test_cost_formulas_on_mixed_transitions(shape, alpha, beta):
    normal = normalize(mixed_automaton())
    initial = normal.automaton.parity.initial
    cutting = next(s for s in normal.automaton.parity.states if s[0] == "s")
    ctx = CostFormulaContext(normal, initial)
    assert ctx.larcut == frozenset()
    assert ctx.larcheck == frozenset({"u"})
    run = shaped_run(shape, {"P": initial, "S": cutting})
    assert eval_cost_alpha(run, ctx) == alpha
    assert eval_cost_beta(run, ctx) == beta


def test_cost_context_needs_normal_form_evidence():
    normal = normalize(counting_automaton())
    with pytest.raises(NotNormalForm):
        CostFormulaContext(normal, ("p", None))


def test_transition_levels():
    normal = normalize(counting_automaton())
    state = normal.automaton.parity.initial
    assert check_rq_transition(candidate(state), normal, state, starred=False).accepted
    verdict = check_rq_transition(candidate(state, root_color=STATE_COLOR), normal, state, starred=False)
    assert not verdict.accepted
    assert "beta is finite" in verdict.describe()
    assert check_rq_transition(candidate(state, root_color=STATE_COLOR), normal, state, starred=True).accepted


def test_transition_candidates_are_validated():
    normal = normalize(counting_automaton())
    state = normal.automaton.parity.initial
    with pytest.raises(NotNormalForm):
        check_rq_transition(candidate(state), normal, "nowhere", starred=False)
    with pytest.raises(MalformedTransition):
        check_rq_transition(candidate(state, leaf_color="other"), normal, state, starred=False)
    looping = RegularTree(root="r", labels={"r": (("a", state), None)}, children={"r": ("r", "r")})
    with pytest.raises(MalformedTransition):
        check_rq_transition(looping, normal, state, starred=False)


def test_rq_chain_admits_runs_built_from_transitions():
    normal = normalize(counting_automaton())
    state = normal.automaton.parity.initial
    chain = rq_chain(normal, state, starred=False)
    assert chain.depth == 1
    assert chain.admits(candidate(state))
    run = RegularTree(root="r",
                      labels={"r": (("a", state), None), "x": (("a", state), STATE_COLOR),
                              "y": (("a", state), None), "z": (("a", state), None)},
                      children={"r": ("x", "y"), "x": ("z", "z"), "y": None, "z": None})
    assert chain.accepts_run(run)
    with pytest.raises(MalformedTransition):
        chain.accepts(run)


def test_chain_levels_need_one_source():
    with pytest.raises(MalformedTransition):
        AutomatonChain()
