"""
Parity Core - Parity tree automata, parity games and their solver

Priorities follow the max convention: the largest priority seen infinitely
often decides, even for the Automaton player and odd for the Pathfinder.
A state of rank r has priority 2r when accepting and 2r + 1 otherwise.
"""
from dataclasses import dataclass, field
from enum import IntEnum

import networkx as nx
from loguru import logger

from .errors import InvalidRun, MalformedAutomaton
from .tree_core import RegularTree, product


class Player(IntEnum):
    AUTOMATON = 0
    PATHFINDER = 1

    @property
    def opponent(self):
        return Player(1 - self)


@dataclass(frozen=True, eq=False)
class ParityAutomaton:
    """Nondeterministic parity automaton on binary trees; states listed in ascending order"""
    states: tuple
    initial: object
    accepting: frozenset
    delta0: frozenset
    delta2: frozenset
    alphabet: frozenset = frozenset()
    name: str = "automaton"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "delta0", frozenset(self.delta0))
        object.__setattr__(self, "delta2", frozenset(self.delta2))
        letters = {a for _, a in self.delta0} | {a for _, a, _, _ in self.delta2}
        object.__setattr__(self, "alphabet", frozenset(self.alphabet) | letters)
        if len(set(self.states)) != len(self.states):
            raise MalformedAutomaton("states must be listed once each")
        known = set(self.states)
        if self.initial not in known:
            raise MalformedAutomaton(f"initial state {self.initial!r} is not declared")
        if not self.accepting <= known:
            raise MalformedAutomaton("accepting states must be declared states")
        for q, _ in self.delta0:
            if q not in known:
                raise MalformedAutomaton(f"leaf transition from undeclared state {q!r}")
        for q, _, q1, q2 in self.delta2:
            if not {q, q1, q2} <= known:
                raise MalformedAutomaton(f"transition {(q, q1, q2)!r} uses undeclared states")
        object.__setattr__(self, "_rank", {q: i for i, q in enumerate(self.states)})

    def rank(self, q):
        return self._rank[q]

    def priority(self, q):
        return 2 * self.rank(q) + (0 if q in self.accepting else 1)

    def max_state(self, states):
        return max(states, key=self.rank)

    def leaf_letters(self, q):
        return sorted((a for p, a in self.delta0 if p == q), key=repr)

    def moves(self, q, a=None):
        """Binary transitions from a state, optionally for one letter, in a fixed order"""
        found = [t for t in self.delta2 if t[0] == q and (a is None or t[1] == a)]
        return sorted(found, key=lambda t: (repr(t[1]), self.rank(t[2]), self.rank(t[3])))


class ParityGame:
    """Finite two-player parity game; positions keep insertion order for tie-breaking"""

    def __init__(self, name="game"):
        self.name = name
        self.owner = {}
        self.priority = {}
        self.edges = {}
        self._index = {}

    def add_position(self, position, owner, priority):
        if position in self.owner:
            return
        self._index[position] = len(self._index)
        self.owner[position] = Player(owner)
        self.priority[position] = int(priority)
        self.edges[position] = []

    def add_edge(self, source, target):
        if target not in self.edges[source]:
            self.edges[source].append(target)

    @property
    def positions(self):
        return list(self._index)

    def index(self, position):
        return self._index[position]

    def successors(self, position):
        return sorted(self.edges[position], key=self.index)

    def __len__(self):
        return len(self._index)


@dataclass
class GameSolution:
    """Winning regions and positional winning strategies"""
    game: ParityGame
    regions: dict
    strategy: dict = field(default_factory=dict)

    def winner(self, position):
        return Player.AUTOMATON if position in self.regions[Player.AUTOMATON] else Player.PATHFINDER

    def move(self, position):
        """Chosen successor; losing positions fall back to the first successor"""
        if position in self.strategy:
            return self.strategy[position]
        succ = self.game.successors(position)
        return succ[0] if succ else None

    def play(self, start, steps):
        """Positions visited when both players follow their strategies"""
        trace = [start]
        for _ in range(steps):
            nxt = self.move(trace[-1])
            if nxt is None:
                break
            trace.append(nxt)
        return trace


_SINK_AUTOMATON = ("__sink__", Player.AUTOMATON)
_SINK_PATHFINDER = ("__sink__", Player.PATHFINDER)


class _Arena:
    """Dead-end-free copy of a game used by the recursive solver"""

    def __init__(self, game):
        self.game = game
        self.owner = dict(game.owner)
        self.priority = dict(game.priority)
        self.succ = {p: game.successors(p) for p in game.positions}
        self.index = {p: game.index(p) for p in game.positions}
        self.dead_ends = [p for p, s in self.succ.items() if not s]
        if self.dead_ends:
            for sink, prio in ((_SINK_AUTOMATON, 0), (_SINK_PATHFINDER, 1)):
                self.owner[sink] = sink[1]
                self.priority[sink] = prio
                self.succ[sink] = [sink]
                self.index[sink] = len(self.index)
            for p in self.dead_ends:
                # the owner of a dead end loses
                loser = self.owner[p]
                self.succ[p] = [_SINK_PATHFINDER if loser is Player.AUTOMATON else _SINK_AUTOMATON]
        self.pred = {p: [] for p in self.succ}
        for p, targets in self.succ.items():
            for t in targets:
                self.pred[t].append(p)

    def attractor(self, player, target, sub):
        """Positions of sub from which player forces a visit to target, with attracting moves"""
        attr = set(target)
        strategy = {}
        remaining = {}
        for p in sub:
            if p not in attr:
                remaining[p] = sum(1 for t in self.succ[p] if t in sub)
        queue = sorted(attr, key=self.index.get)
        while queue:
            t = queue.pop(0)
            for p in sorted(self.pred[t], key=self.index.get):
                if p not in sub or p in attr:
                    continue
                if self.owner[p] is player:
                    # t is already in the attractor
                    strategy[p] = t
                    attr.add(p)
                    queue.append(p)
                else:
                    remaining[p] -= 1
                    if remaining[p] == 0:
                        attr.add(p)
                        queue.append(p)
        return attr, strategy

    def solve(self, sub):
        regions = {Player.AUTOMATON: set(), Player.PATHFINDER: set()}
        if not sub:
            return regions, {}
        top = max(self.priority[p] for p in sub)
        player = Player(top % 2)
        opponent = player.opponent
        tops = {p for p in sub if self.priority[p] == top}
        attr, attr_strategy = self.attractor(player, tops, sub)
        inner, inner_strategy = self.solve(sub - attr)
        if not inner[opponent]:
            regions[player] = set(sub)
            strategy = {p: s for p, s in inner_strategy.items() if self.owner[p] is player}
            strategy.update(attr_strategy)
            for p in tops:
                if self.owner[p] is player:
                    strategy[p] = min((s for s in self.succ[p] if s in sub), key=self.index.get)
            return regions, strategy
        back, back_strategy = self.attractor(opponent, inner[opponent], sub)
        rest, rest_strategy = self.solve(sub - back)
        regions[player] = rest[player]
        regions[opponent] = rest[opponent] | back
        strategy = dict(rest_strategy)
        for p, s in inner_strategy.items():
            if self.owner[p] is opponent and p in inner[opponent]:
                strategy[p] = s
        strategy.update(back_strategy)
        return regions, strategy


def solve_parity_game(game):
    """Partition positions into winning regions with positional strategies"""
    arena = _Arena(game)
    regions, strategy = arena.solve(frozenset(arena.succ))
    real = set(game.positions)
    solution = GameSolution(
        game=game,
        regions={pl: frozenset(r & real) for pl, r in regions.items()},
        strategy={
            p: s for p, s in strategy.items()
            if p in real and s in real and p in regions[game.owner[p]]
        },
    )
    logger.debug("solved {} with {} positions, {} dead ends",
                 game.name, len(game), len(arena.dead_ends))
    return solution


# Membership
def _check_letters(aut, tree):
    for vertex in tree.vertices:
        if tree.label(vertex) not in aut.alphabet:
            logger.debug("letter {!r} at vertex {!r} is outside the automaton alphabet",
                         tree.label(vertex), vertex)


def membership_game(aut, tree):
    """Acceptance game of an automaton on a regular tree"""
    game = ParityGame(f"{aut.name}-membership")
    accept = ("accept",)
    game.add_position(("state", tree.root, aut.initial), Player.AUTOMATON, aut.priority(aut.initial))
    pending = [("state", tree.root, aut.initial)]
    while pending:
        pos = pending.pop()
        _, v, q = pos
        a = tree.label(v)
        pair = tree.kids(v)
        if not pair:
            if (q, a) in aut.delta0:
                game.add_position(accept, Player.AUTOMATON, 0)
                game.add_edge(accept, accept)
                game.add_edge(pos, accept)
            continue
        for _, _, q1, q2 in aut.moves(q, a):
            move = ("move", v, q, q1, q2)
            game.add_position(move, Player.PATHFINDER, 0)
            game.add_edge(pos, move)
            for child, state in ((pair[0], q1), (pair[1], q2)):
                nxt = ("state", child, state)
                if nxt not in game.owner:
                    game.add_position(nxt, Player.AUTOMATON, aut.priority(state))
                    pending.append(nxt)
                game.add_edge(move, nxt)
    return game


@dataclass
class MembershipResult:
    accepted: bool
    run: object = None
    game: object = None
    solution: object = None


def membership(aut, tree):
    """Decide tree acceptance; on acceptance also synthesise a regular run"""
    _check_letters(aut, tree)
    game = membership_game(aut, tree)
    solution = solve_parity_game(game)
    start = ("state", tree.root, aut.initial)
    if solution.winner(start) is not Player.AUTOMATON:
        return MembershipResult(False, None, game, solution)
    labels, children = {}, {}
    queue = [start]
    while queue:
        pos = queue.pop()
        _, v, q = pos
        key = (v, q)
        if key in labels:
            continue
        labels[key] = (tree.label(v), q)
        pair = tree.kids(v)
        if not pair:
            children[key] = None
            continue
        _, _, _, q1, q2 = solution.strategy[pos]
        children[key] = ((pair[0], q1), (pair[1], q2))
        queue.extend([("state", pair[0], q1), ("state", pair[1], q2)])
    run = RegularTree(root=(tree.root, aut.initial), labels=labels, children=children)
    return MembershipResult(True, run, game, solution)


# Emptiness
def emptiness_game(aut):
    game = ParityGame(f"{aut.name}-emptiness")
    for q in aut.states:
        game.add_position(("state", q), Player.AUTOMATON, aut.priority(q))
    for q in aut.states:
        for a in aut.leaf_letters(q):
            leaf = ("leaf", q, a)
            game.add_position(leaf, Player.AUTOMATON, 0)
            game.add_edge(leaf, leaf)
            game.add_edge(("state", q), leaf)
        for _, a, q1, q2 in aut.moves(q):
            move = ("move", q, a, q1, q2)
            game.add_position(move, Player.PATHFINDER, 0)
            game.add_edge(("state", q), move)
            game.add_edge(move, ("state", q1))
            game.add_edge(move, ("state", q2))
    return game


@dataclass
class EmptinessResult:
    empty: bool
    tree: object = None
    run: object = None


def emptiness(aut):
    """Decide language emptiness; a non-empty language yields a regular witness tree and run"""
    game = emptiness_game(aut)
    solution = solve_parity_game(game)
    if solution.winner(("state", aut.initial)) is not Player.AUTOMATON:
        return EmptinessResult(True)
    labels, children = {}, {}
    queue = [aut.initial]
    while queue:
        q = queue.pop()
        if q in labels:
            continue
        chosen = solution.strategy[("state", q)]
        if chosen[0] == "leaf":
            labels[q] = chosen[2]
            children[q] = None
        else:
            _, _, a, q1, q2 = chosen
            labels[q] = a
            children[q] = (q1, q2)
            queue.extend([q1, q2])
    tree = RegularTree(root=aut.initial, labels=labels, children=children)
    run = tree.relabel(lambda q, a: (a, q))
    logger.debug("emptiness witness for {} has {} vertices", aut.name, len(labels))
    return EmptinessResult(False, tree, run)


# Runs
def run_state(run, vertex):
    """State coordinate of a run vertex label (letter, state)"""
    return run.label(vertex)[1]


def parity_violation(graph, color, aut):
    """
    First rejecting state whose occurrences lie on a cycle of vertices that
    carry no larger state; color maps a vertex to its state or None.
    Returns (state, cycle vertex) or None when every infinite path satisfies
    the parity condition.
    """
    colors = {v: color(v) for v in graph.nodes}
    for r in sorted({c for c in colors.values() if c is not None and c not in aut.accepting},
                    key=aut.rank):
        keep = [v for v, c in colors.items() if c is None or aut.rank(c) <= aut.rank(r)]
        sub = graph.subgraph(keep)
        for comp in nx.strongly_connected_components(sub):
            hits = [v for v in comp if colors[v] == r]
            if not hits:
                continue
            if len(comp) > 1 or any(sub.has_edge(v, v) for v in hits):
                return r, hits[0]
    return None


def check_run(aut, tree, run):
    """True iff run is an accepting run of the automaton on the tree"""
    pairs = product(tree, run)
    for vertex in pairs.vertices:
        letter, (run_letter, _) = pairs.label(vertex)
        if letter != run_letter:
            logger.debug("run letter {!r} differs from input letter {!r}", run_letter, letter)
            return False
    if run_state(run, run.root) != aut.initial:
        return False
    try:
        check_transitions(aut, run)
    except InvalidRun as exc:
        logger.debug("{}", exc)
        return False
    return parity_violation(run.graph(), lambda v: run_state(run, v), aut) is None


def check_transitions(aut, run, leaves=True):
    """Raise InvalidRun unless every vertex follows a transition; leaves may be left unchecked"""
    for vertex in run.vertices:
        a, q = run.label(vertex)
        pair = run.kids(vertex)
        if not pair:
            if leaves and (q, a) not in aut.delta0:
                raise InvalidRun(f"leaf {vertex!r} labelled ({a!r}, {q!r}) has no leaf transition")
            continue
        q1, q2 = run_state(run, pair[0]), run_state(run, pair[1])
        if (q, a, q1, q2) not in aut.delta2:
            raise InvalidRun(f"vertex {vertex!r}: ({q!r}, {a!r}, {q1!r}, {q2!r}) is not a transition")

