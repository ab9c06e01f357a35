"""Tests for parity automata, the game solver, membership and emptiness."""

import pytest
from hypothesis import given, settings, strategies as st

from core.errors import MalformedAutomaton
from core.parity_core import ParityAutomaton, ParityGame, Player, check_run, emptiness, membership, solve_parity_game
from core.tree_core import RegularTree
from tests.oracles import brute_force_winners, opponent_escapes, random_game, random_tree, seeded


def loop_tree(label="a"):
    return RegularTree(root="x", labels={"x": label}, children={"x": ("x", "x")})


def leaf_tree(label="a"):
    return RegularTree(root="x", labels={"x": label}, children={"x": None})


def looping_automaton(accepting):
    return ParityAutomaton(states=("q",), initial="q", accepting={"q"} if accepting else set(),
                           delta0={("q", "a")}, delta2={("q", "a", "q", "q")})


def alternating_automaton():
    """p and q alternate on every path; b-leaves are accepted from q only"""
    return ParityAutomaton(states=("p", "q"), initial="p", accepting={"q"},
                           delta0={("q", "b")}, delta2={("p", "a", "q", "q"), ("q", "a", "p", "p")})


def test_priorities_follow_rank_and_acceptance():
    aut = alternating_automaton()
    assert aut.priority("p") == 1
    assert aut.priority("q") == 2


def test_undeclared_states_are_rejected():
    with pytest.raises(MalformedAutomaton):
        ParityAutomaton(states=("q",), initial="z", accepting=(), delta0=(), delta2=())


def test_small_game_solution():
    game = ParityGame("tiny")
    game.add_position("a", Player.AUTOMATON, 2)
    game.add_position("b", Player.PATHFINDER, 1)
    game.add_position("c", Player.AUTOMATON, 3)
    game.add_edge("a", "a")
    game.add_edge("a", "b")
    game.add_edge("b", "c")
    game.add_edge("c", "c")
    solution = solve_parity_game(game)
    assert solution.winner("a") is Player.AUTOMATON
    assert solution.winner("b") is Player.PATHFINDER
    assert solution.move("a") == "a"
    assert solution.play("a", 3) == ["a", "a", "a", "a"]


def test_dead_end_owner_loses():
    game = ParityGame("dead")
    game.add_position("stuck", Player.AUTOMATON, 0)
    game.add_position("trap", Player.PATHFINDER, 0)
    solution = solve_parity_game(game)
    assert solution.winner("stuck") is Player.PATHFINDER
    assert solution.winner("trap") is Player.AUTOMATON


def test_attractor_moves_leave_odd_self_loop():
    game = ParityGame("escape")
    game.add_position("v0", Player.AUTOMATON, 1)
    game.add_position("v1", Player.PATHFINDER, 0)
    game.add_edge("v0", "v0")
    game.add_edge("v0", "v1")
    solution = solve_parity_game(game)
    assert solution.winner("v0") is Player.AUTOMATON
    assert solution.move("v0") == "v1"
    assert not opponent_escapes(game, Player.AUTOMATON, {"v0": solution.move("v0")}, "v0")


def test_membership_on_accepting_loop():
    result = membership(looping_automaton(True), loop_tree())
    assert result.accepted
    assert result.run.root == ("x", "q")
    assert check_run(looping_automaton(True), loop_tree(), result.run)


def test_membership_rejects_odd_loop():
    assert not membership(looping_automaton(False), loop_tree()).accepted


def test_membership_on_leaf():
    assert membership(looping_automaton(False), leaf_tree()).accepted
    assert not membership(looping_automaton(False), leaf_tree("b")).accepted


def test_alternating_run_is_accepted():
    aut = alternating_automaton()
    result = membership(aut, loop_tree())
    assert result.accepted
    assert {q for _, q in result.run.labels.values()} == {"p", "q"}


def test_emptiness():
    assert emptiness(looping_automaton(False)).empty is False
    no_leaves = ParityAutomaton(states=("q",), initial="q", accepting=(), delta0=(),
                                delta2={("q", "a", "q", "q")})
    assert emptiness(no_leaves).empty


def test_emptiness_witness_is_accepted():
    aut = alternating_automaton()
    result = emptiness(aut)
    assert not result.empty
    assert membership(aut, result.tree).accepted
    assert check_run(aut, result.tree, result.run)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_random_games_fit_their_size_property(seed: int) -> None:
    """Property: generated single-position games draw no more successors than positions exist."""
    game = random_game(seeded(seed), 1)
    assert len(set(game.successors("v0"))) <= 1


@settings(max_examples=300, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_solver_matches_strategy_enumeration_property(seed: int) -> None:
    """Property: winning regions equal those found by enumerating positional strategies."""
    game = random_game(seeded(seed), seeded(seed).randint(1, 8))
    solution = solve_parity_game(game)
    expected = brute_force_winners(game)
    assert set(solution.regions[Player.AUTOMATON]) == expected
    assert set(solution.regions[Player.PATHFINDER]) == set(game.positions) - expected


@settings(max_examples=300, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_winning_strategies_stay_in_region_property(seed: int) -> None:
    """Property: a winner's strategy never leaves its winning region."""
    game = random_game(seeded(seed), seeded(seed).randint(1, 8))
    solution = solve_parity_game(game)
    for position, target in solution.strategy.items():
        winner = solution.winner(position)
        assert game.owner[position] is winner
        assert solution.winner(target) is winner


@settings(max_examples=300, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_winning_strategies_win_against_every_opponent_property(seed: int) -> None:
    """Property: following the returned strategy, the opponent cannot win from any position of the region."""
    game = random_game(seeded(seed), seeded(seed).randint(1, 8))
    solution = solve_parity_game(game)
    for player in Player:
        region = solution.regions[player]
        choice = {p: solution.move(p) for p in region if game.owner[p] is player}
        for p in region:
            assert not opponent_escapes(game, player, choice, p)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000))
def test_membership_runs_are_accepting_property(seed: int) -> None:
    """Property: every run produced by membership passes the run checker."""
    rng = seeded(seed)
    tree = random_tree(rng, 4)
    aut = ParityAutomaton(
        states=("p", "q", "r"), initial="p", accepting={"q"},
        delta0={(s, a) for s in ("p", "q", "r") for a in ("a", "b") if rng.random() < 0.6},
        delta2={(s, a, rng.choice("pqr"), rng.choice("pqr")) for s in "pqr" for a in "ab" for _ in range(2)},
    )
    result = membership(aut, tree)
    if result.accepted:
        assert check_run(aut, tree, result.run)
