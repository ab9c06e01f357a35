"""
Chain Games - Generalized parity automata with finite transition lists

A generalized automaton reads partially colored trees: a run is cut into
factors at its colored nodes, every factor must be one of the listed
transition trees, and the colors met along each infinite path obey the
parity condition. Acceptance is decided by a game in which the Automaton
picks transitions and the Pathfinder picks a colored leaf to continue from.
"""
from dataclasses import dataclass, field

import networkx as nx
from loguru import logger

from .counter_core import INFINITY, ZERO, CounterTree, value_tree
from .errors import MalformedTransition, NotNormalForm
from .parity_core import ParityAutomaton, ParityGame, Player, membership, parity_violation, solve_parity_game
from .tree_core import RegularTree, unfold
from .wmsoup_core import partial_run_automaton, partial_run_in

STATE_COLOR = "state"


def color_of(tree, vertex):
    return tree.label(vertex)[1]


def base_of(tree, vertex):
    return tree.label(vertex)[0]


def check_transition(tree):
    """Raise MalformedTransition when a colored node is neither the root nor a leaf"""
    below_root = set()
    for vertex in tree.vertices:
        below_root |= set(tree.kids(vertex) or ())
    for vertex in below_root:
        if color_of(tree, vertex) is not None and not tree.is_leaf(vertex):
            raise MalformedTransition(f"interior vertex {vertex!r} is colored {color_of(tree, vertex)!r}")


def colored_leaves(tree):
    """Leaf vertices below the root that carry a color"""
    below_root = set()
    for vertex in tree.vertices:
        below_root |= set(tree.kids(vertex) or ())
    return sorted((v for v in below_root if tree.is_leaf(v) and color_of(tree, v) is not None), key=repr)


@dataclass(frozen=True, eq=False)
class GeneralizedAutomaton:
    states: tuple
    accepting: frozenset
    transitions: tuple
    name: str = "generalized"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        known = set(self.states)
        for i, sigma in enumerate(self.transitions):
            check_transition(sigma)
            for vertex in sigma.vertices:
                color = color_of(sigma, vertex)
                if color is not None and color not in known:
                    raise MalformedTransition(f"transition {i} uses undeclared color {color!r}")
        object.__setattr__(self, "_rank", {q: i for i, q in enumerate(self.states)})

    def rank(self, q):
        return self._rank[q]

    def priority(self, q):
        return 2 * self.rank(q) + (0 if q in self.accepting else 1)

    def as_parity(self):
        """Bare parity automaton over the same states, used for the cycle check on colors"""
        return ParityAutomaton(states=self.states, initial=self.states[0], accepting=self.accepting,
                               delta0=(), delta2=(), name=self.name)


@dataclass(frozen=True)
class Profile:
    root: object
    leaves: frozenset

    def __str__(self):
        root = "-" if self.root is None else self.root
        return f"{root} {{{','.join(sorted(map(str, self.leaves)))}}}"


def transition_profiles(gen):
    """Profile (root color, colors of colored leaves) of every transition"""
    return {
        Profile(color_of(sigma, sigma.root), frozenset(color_of(sigma, v) for v in colored_leaves(sigma)))
        for sigma in gen.transitions
    }


# Acceptance game
INITIAL_POSITION = ("initial",)


def acceptance_game(gen):
    """
    Game where Automaton positions are the initial position and pairs
    (color, base letter) of colored leaves, and Pathfinder positions are
    transitions. Matching the base letter keeps the leaf and the root of the
    next factor the same node. Positions carry the base letter next to the
    color rather than the color alone.
    """
    game = ParityGame(f"{gen.name}-acceptance")
    game.add_position(INITIAL_POSITION, Player.AUTOMATON, 0)
    pending = [INITIAL_POSITION]
    while pending:
        pos = pending.pop()
        for i, sigma in enumerate(gen.transitions):
            root_color = color_of(sigma, sigma.root)
            if pos == INITIAL_POSITION:
                if root_color is not None:
                    continue
            elif (root_color, base_of(sigma, sigma.root)) != pos[1:]:
                continue
            move = ("transition", i)
            if move not in game.owner:
                game.add_position(move, Player.PATHFINDER, 0)
                for leaf in colored_leaves(sigma):
                    nxt = ("colored", color_of(sigma, leaf), base_of(sigma, leaf))
                    if nxt not in game.owner:
                        game.add_position(nxt, Player.AUTOMATON, gen.priority(nxt[1]))
                        pending.append(nxt)
                    game.add_edge(move, nxt)
            game.add_edge(pos, move)
    return game


@dataclass
class AcceptanceResult:
    accepted: bool
    game: ParityGame
    run: RegularTree = None
    factors: dict = field(default_factory=dict)


def acceptance(gen):
    """Solve the acceptance game; on an Automaton win unfold the strategy into a regular run"""
    game = acceptance_game(gen)
    solution = solve_parity_game(game)
    if solution.winner(INITIAL_POSITION) is not Player.AUTOMATON:
        return AcceptanceResult(False, game)

    def entry(pos):
        i = solution.strategy[pos][1]
        return (pos, gen.transitions[i].root)

    labels, children, factors = {}, {}, {}
    queue = [INITIAL_POSITION]
    done = set()
    while queue:
        pos = queue.pop()
        if pos in done:
            continue
        done.add(pos)
        i = solution.strategy[pos][1]
        sigma = gen.transitions[i]
        factors[pos] = i
        leaves = set(colored_leaves(sigma))
        for vertex in sigma.vertices:
            key = (pos, vertex)
            if vertex != sigma.root and vertex in leaves:
                continue
            labels[key] = sigma.label(vertex)
            pair = sigma.kids(vertex)
            if not pair:
                children[key] = None
                continue
            kids = []
            for child in pair:
                if child != sigma.root and child in leaves:
                    nxt = ("colored", color_of(sigma, child), base_of(sigma, child))
                    kids.append(entry(nxt))
                    queue.append(nxt)
                else:
                    kids.append((pos, child))
            children[key] = tuple(kids)
    run = RegularTree(root=entry(INITIAL_POSITION), labels=labels, children=children)
    logger.debug("{}: unfolded run with {} vertices over {} factors", gen.name, len(labels), len(factors))
    return AcceptanceResult(True, game, run, factors)


def _same_tree(a, u, b, v):
    """True iff the trees presented from u in a and from v in b coincide"""
    seen = set()
    stack = [(u, v)]
    while stack:
        x, y = stack.pop()
        if (x, y) in seen:
            continue
        seen.add((x, y))
        if a.label(x) != b.label(y):
            return False
        kx, ky = a.kids(x), b.kids(y)
        if bool(kx) != bool(ky):
            return False
        if kx:
            stack.extend(zip(kx, ky))
    return True


def extract_factor(run, vertex):
    """Factor of a run rooted at a vertex: descend until colored nodes, which become leaves"""
    root = ("factor-root", vertex)
    labels = {root: run.label(vertex)}
    children = {root: run.kids(vertex)}
    stack = list(run.kids(vertex) or ())
    while stack:
        v = stack.pop()
        if v in labels:
            continue
        labels[v] = run.label(v)
        pair = run.kids(v)
        if not pair or color_of(run, v) is not None:
            children[v] = None
            continue
        children[v] = pair
        stack.extend(pair)
    return RegularTree(root=root, labels=labels, children=children)


def verify_generalized_run(gen, run):
    """True iff the run has an uncolored root, every factor is a listed transition, and colors obey parity"""
    if color_of(run, run.root) is not None:
        return False
    starts = [run.root] + [v for v in run.vertices if v != run.root and color_of(run, v) is not None]
    for start in starts:
        factor = extract_factor(run, start)
        if not any(_same_tree(factor, factor.root, sigma, sigma.root) for sigma in gen.transitions):
            logger.debug("factor at {!r} matches no transition", start)
            return False
    return parity_violation(run.graph(), lambda v: color_of(run, v), gen.as_parity()) is None


# Profile game
BOTTOM = ("bottom",)


def profile_game(profiles, states, accepting):
    """Two-level game: Automaton picks a leaf-state set for the current state, Pathfinder picks a state from it"""
    gen_rank = {q: i for i, q in enumerate(states)}

    def priority(q):
        return 2 * gen_rank[q] + (0 if q in accepting else 1)

    game = ParityGame("profiles")
    game.add_position(BOTTOM, Player.AUTOMATON, 0)
    for q in states:
        game.add_position(("state", q), Player.AUTOMATON, priority(q))
    for profile in sorted(profiles, key=str):
        source = BOTTOM if profile.root is None else ("state", profile.root)
        target = ("set", profile.leaves)
        game.add_position(target, Player.PATHFINDER, 0)
        game.add_edge(source, target)
        for p in sorted(profile.leaves, key=gen_rank.get):
            game.add_edge(target, ("state", p))
    return game


def profile_game_winner(profiles, states, accepting):
    return solve_parity_game(profile_game(profiles, states, accepting)).winner(BOTTOM)


# Cost formulas
@dataclass(frozen=True, eq=False)
class CostFormulaContext:
    """A normalized automaton, one of its states, and that state's record cut and check sets"""
    normal_form: object
    state: object

    def __post_init__(self):
        self.normal_form.evidence.require(self.state)

    @property
    def automaton(self):
        return self.normal_form.automaton

    @property
    def larcut(self):
        return self.normal_form.larcut(self.state)

    @property
    def larcheck(self):
        return self.normal_form.larcheck(self.state)


def _run_values(run, ctx):
    """Unfolded run, counter values per (address, counter), and the run state at each address"""
    aut = ctx.automaton
    nodes = unfold(run)
    ctree = CounterTree(nodes.relabel(lambda v, lab: aut.counterops(lab[0][1])), aut.counters)
    return nodes, value_tree(ctree)


def _state_at(nodes, addr):
    return nodes.label(addr)[0][1]


def eval_cost_alpha(run, ctx):
    """Largest value of a bounded counter outside larcut(q) at a node with no ancestor cutting it"""
    aut = ctx.automaton
    nodes, values = _run_values(run, ctx)
    best = ZERO
    for c in aut.bounded:
        if c in ctx.larcut:
            continue
        for addr in nodes.labels:
            if any(c in aut.cuts(_state_at(nodes, addr[:i])) for i in range(len(addr))):
                continue
            best = max(best, values[(addr, c)])
    return best


def eval_cost_beta(run, ctx):
    """
    Infinity for an uncolored root; otherwise the least, over checked unbounded
    counters and colored leaves, of the largest value at a strict ancestor of
    the leaf that checks the counter.
    """
    if color_of(run, run.root) is None:
        return INFINITY
    aut = ctx.automaton
    nodes, values = _run_values(run, ctx)
    leaves = [a for a in nodes.labels if a and nodes.is_leaf(a) and nodes.label(a)[1] is not None]
    best = INFINITY
    for c in aut.unbounded:
        if c not in ctx.larcheck:
            continue
        for leaf in leaves:
            checked = [values[(leaf[:i], c)] for i in range(len(leaf))
                       if c in aut.checks(_state_at(nodes, leaf[:i]))]
            best = min(best, max(checked, default=ZERO))
    return best


@dataclass
class TransitionVerdict:
    accepted: bool
    failures: list = field(default_factory=list)
    note: str = "checked on a real finite candidate; closure membership reduces to exact membership"

    def describe(self):
        return "accept" if self.accepted else "reject(" + "; ".join(self.failures) + ")"


def predecessor(states, q):
    i = states.index(q)
    return states[i - 1] if i > 0 else None


def _path_condition(run, aut, q):
    """Every root-to-colored-leaf path has largest state q"""
    graph = run.graph()
    targets = [v for v in colored_leaves(run)]
    if not targets:
        return True
    rank = aut.parity.rank
    useful = set(targets)
    for t in targets:
        useful |= nx.ancestors(graph, t)
    if any(rank(base_of(run, v)[1]) > rank(q) for v in useful):
        return False
    avoid = graph.subgraph([v for v in graph if base_of(run, v)[1] != q])
    if run.root not in avoid:
        return True
    reachable = {run.root} | nx.descendants(avoid, run.root)
    return not any(t in reachable for t in targets)


def check_rq_transition(candidate, normal_form, q, starred):
    """Decide whether a candidate tree is a transition of the R_q or R_q* level for state q"""
    aut = normal_form.automaton
    if q not in aut.parity.states:
        raise NotNormalForm(f"state {q!r} is not a state of the normalized automaton")
    normal_form.evidence.require(q)
    check_transition(candidate)
    if not candidate.is_finite():
        raise MalformedTransition("transition candidates must be finite trees")
    for vertex in candidate.vertices:
        if color_of(candidate, vertex) not in (None, STATE_COLOR):
            raise MalformedTransition(f"vertex {vertex!r} has color {color_of(candidate, vertex)!r}")

    failures = []
    projection = candidate.relabel(lambda v, lab: lab[0])
    states = aut.parity.states
    if q not in aut.parity.accepting:
        starred = True
    bound, star = (predecessor(states, q), False) if starred else (q, True)
    if not partial_run_in(aut, projection, bound=bound, starred=star):
        failures.append("projection is not a partial run of the required level")
    if not _path_condition(candidate, aut, q):
        failures.append(f"a path to a colored leaf does not peak at {q}")
    if not starred:
        ctx = CostFormulaContext(normal_form, q)
        if eval_cost_alpha(candidate, ctx).is_infinite:
            failures.append("alpha is infinite")
        if not eval_cost_beta(candidate, ctx).is_infinite:
            failures.append("beta is finite")
    return TransitionVerdict(not failures, failures)


# Automaton chains
@dataclass(frozen=True, eq=False)
class AutomatonChain:
    """
    Depth 0 wraps a parity automaton. Depth n > 0 admits a transition when its
    base projection is accepted by the inner chain, alpha is finite and beta
    is infinite for the declared cost context, and the optional path check holds.
    """
    parity: ParityAutomaton = None
    inner: "AutomatonChain" = None
    states: tuple = ()
    accepting: frozenset = frozenset()
    costs: CostFormulaContext = None
    path_check: object = None

    def __post_init__(self):
        if (self.parity is None) == (self.inner is None):
            raise MalformedTransition("a chain level needs exactly one of a parity automaton or an inner chain")

    @property
    def depth(self):
        return 0 if self.inner is None else self.inner.depth + 1

    def accepts(self, tree):
        """Depth-0 membership of a regular tree"""
        if self.parity is None:
            raise MalformedTransition("only depth-0 chains decide trees directly; use accepts_run")
        return membership(self.parity, tree).accepted

    def admits(self, sigma):
        """Transition predicate of a positive-depth level"""
        projection = sigma.relabel(lambda v, lab: lab[0])
        if self.inner.depth == 0:
            inner_ok = self.inner.accepts(projection)
        else:
            inner_ok = self.inner.accepts_run(projection)
        if not inner_ok:
            return False
        if self.costs is not None:
            if eval_cost_alpha(sigma, self.costs).is_infinite:
                return False
            if not eval_cost_beta(sigma, self.costs).is_infinite:
                return False
        return self.path_check is None or self.path_check(sigma)

    def accepts_run(self, run):
        """Positive depth: every factor admitted and colors obeying parity"""
        if color_of(run, run.root) is not None:
            return False
        starts = [run.root] + [v for v in run.vertices if v != run.root and color_of(run, v) is not None]
        for start in starts:
            if not self.admits(extract_factor(run, start)):
                return False
        parity = ParityAutomaton(states=self.states, initial=self.states[0], accepting=self.accepting,
                                 delta0=(), delta2=())
        return parity_violation(run.graph(), lambda v: color_of(run, v), parity) is None


def rq_chain(normal_form, q, starred):
    """Depth-1 chain whose admitted transitions are the finite R_q (or R_q*) transitions"""
    aut = normal_form.automaton
    if q not in aut.parity.accepting:
        starred = True
    inner = AutomatonChain(parity=partial_run_automaton(aut))
    bound, star = (predecessor(aut.parity.states, q), False) if starred else (q, True)

    def path_check(sigma):
        projection = sigma.relabel(lambda v, lab: lab[0])
        return partial_run_in(aut, projection, bound=bound, starred=star) and _path_condition(sigma, aut, q)

    accepting = frozenset() if starred else frozenset({STATE_COLOR})
    costs = None if starred else CostFormulaContext(normal_form, q)
    return AutomatonChain(inner=inner, states=(STATE_COLOR,), accepting=accepting,
                          costs=costs, path_check=path_check)
