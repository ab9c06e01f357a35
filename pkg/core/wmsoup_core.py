"""
WMSO+UP Core - Parity automata extended with counter bookkeeping

Every state carries a set of counter operation tuples, a set of counters it
cuts and a set of counters it checks. A run is accepting when the parity
condition holds, every bounded counter is bounded on each cut-free
component, and every unbounded counter is unbounded along every path that
checks it infinitely often.
"""
from dataclasses import dataclass, field
from enum import Enum
from itertools import product as cartesian

import networkx as nx
from loguru import logger

from .counter_core import CounterTree, downward_values
from .errors import InvalidRun, MalformedAutomaton, NotRootDirected, PropertyAViolated
from .parity_core import ParityAutomaton, check_transitions, parity_violation, run_state
from .tree_core import RegularTree, UPPath, product


@dataclass(frozen=True, eq=False)
class WmsoUpAutomaton:
    """A parity automaton whose states also drive bounded and unbounded counters"""
    parity: ParityAutomaton
    bounded: tuple = ()
    unbounded: tuple = ()
    cut: dict = field(default_factory=dict)
    check: dict = field(default_factory=dict)
    ops: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "bounded", tuple(self.bounded))
        object.__setattr__(self, "unbounded", tuple(self.unbounded))
        if set(self.bounded) & set(self.unbounded):
            raise MalformedAutomaton("a counter cannot be both bounded and unbounded")
        counters = set(self.counters)
        states = set(self.parity.states)
        for table in (self.cut, self.check, self.ops):
            extra = set(table) - states
            if extra:
                raise MalformedAutomaton(f"counter data for undeclared states {sorted(map(str, extra))}")
        for q in states:
            named = set(self.cut.get(q, ())) | set(self.check.get(q, ()))
            for op in self.ops.get(q, ()):
                named |= {op.source, op.target}
            if not named <= counters:
                raise MalformedAutomaton(f"state {q!r} uses undeclared counters {sorted(named - counters)}")

    @property
    def name(self):
        return self.parity.name

    @property
    def counters(self):
        return self.bounded + self.unbounded

    def cuts(self, q):
        return frozenset(self.cut.get(q, ()))

    def checks(self, q):
        return frozenset(self.check.get(q, ()))

    def counterops(self, q):
        return frozenset(self.ops.get(q, ()))

    def all_ops(self):
        for q in self.parity.states:
            for op in self.counterops(q):
                yield q, op


def counter_free_reduct(aut):
    """The parity automaton left after forgetting every counter"""
    return aut.parity


def check_property_a(aut):
    """Raise unless every tuple on a bounded counter is root-directed and mentions no other counter"""
    bounded = set(aut.bounded)
    for q, op in aut.all_ops():
        if op.source not in bounded and op.target not in bounded:
            continue
        if op.source != op.target:
            raise PropertyAViolated(f"tuple {op} of state {q!r} mixes a bounded counter with another")
        if not op.root_directed:
            raise PropertyAViolated(f"tuple {op} of state {q!r} on a bounded counter is not root-directed")


def counterops_tree(aut, run, leaves=True):
    """Counter tree obtained by replacing each run label with its state's tuples"""
    check_transitions(aut.parity, run, leaves=leaves)
    return CounterTree(run.relabel(lambda v, lab: aut.counterops(lab[1])), aut.counters)


class RejectReason(Enum):
    LETTER = "letter"
    INITIAL = "initial"
    TRANSITION = "transition"
    PARITY = "parity"
    BOUNDEDNESS = "boundedness"
    UNBOUNDEDNESS = "unboundedness"


@dataclass
class Verdict:
    """Outcome of checking a run; rejections name the failing condition"""
    accepted: bool
    reason: RejectReason = None
    counter: str = None
    state: object = None
    vertex: object = None
    cycle: list = field(default_factory=list)
    path: UPPath = None

    def describe(self):
        if self.accepted:
            return "accept"
        parts = [f"reject({self.reason.value}"]
        if self.counter is not None:
            parts.append(f", counter {self.counter}")
        if self.state is not None:
            parts.append(f", state {self.state}")
        if self.path is not None:
            parts.append(f", path {self.path}")
        return "".join(parts) + ")"


def _cycle_path(run, graph, cycle):
    """UP path whose prefix reaches the first cycle vertex and whose loop follows the cycle"""
    prefix = run.address_of(cycle[0])
    loop = ""
    for u, v in zip(cycle, cycle[1:] + cycle[:1]):
        loop += graph[u][v]["sides"][0]
    return UPPath(prefix, loop)


def _find_cycle_through(graph, vertex):
    if graph.has_edge(vertex, vertex):
        return [vertex]
    for succ in sorted(graph.successors(vertex), key=repr):
        if nx.has_path(graph, succ, vertex):
            return [vertex] + nx.shortest_path(graph, succ, vertex)[:-1]
    return None


def accept_run(aut, tree, run):
    """Check a regular run of a WMSO+UP automaton whose counters are all root-directed"""
    check_property_a(aut)
    for q, op in aut.all_ops():
        if not op.root_directed:
            raise NotRootDirected(f"tuple {op} of state {q!r} is not root-directed")

    pairs = product(tree, run)
    for vertex in pairs.vertices:
        letter, (run_letter, _) = pairs.label(vertex)
        if letter != run_letter:
            return Verdict(False, RejectReason.LETTER, vertex=vertex)
    if run_state(run, run.root) != aut.parity.initial:
        return Verdict(False, RejectReason.INITIAL, vertex=run.root)
    try:
        check_transitions(aut.parity, run)
    except InvalidRun as exc:
        logger.debug("{}", exc)
        return Verdict(False, RejectReason.TRANSITION)

    graph = run.graph()
    broken = parity_violation(graph, lambda v: run_state(run, v), aut.parity)
    if broken is not None:
        state, vertex = broken
        cycle = _find_cycle_through(
            graph.subgraph([v for v in graph if aut.parity.rank(run_state(run, v)) <= aut.parity.rank(state)]),
            vertex)
        return Verdict(False, RejectReason.PARITY, state=state, vertex=vertex,
                       cycle=cycle, path=_cycle_path(run, graph, cycle))

    ctree = CounterTree(run.relabel(lambda v, lab: aut.counterops(lab[1])), aut.counters)
    values = downward_values(ctree)
    for c in aut.bounded:
        for v in run.vertices:
            if c in aut.cuts(run_state(run, v)):
                continue
            if values[(v, c)].is_infinite:
                return Verdict(False, RejectReason.BOUNDEDNESS, counter=c, vertex=v)
    for c in aut.unbounded:
        checking = [v for v in run.vertices if c in aut.checks(run_state(run, v))]
        finite = graph.subgraph(
            [v for v in graph if not (c in aut.checks(run_state(run, v)) and values[(v, c)].is_infinite)])
        for v in checking:
            if v not in finite:
                continue
            cycle = _find_cycle_through(finite, v)
            if cycle:
                return Verdict(False, RejectReason.UNBOUNDEDNESS, counter=c, vertex=v,
                               cycle=cycle, path=_cycle_path(run, graph, cycle))
    return Verdict(True)


# Semi-emptiness
FRESH = "fresh"
SHARED = "shared"


def candidate_runs(aut, max_vertices):
    """Regular run presentations with at most max_vertices vertices, consistent with the transitions"""
    parity = aut.parity
    choices = {}
    for q in parity.states:
        options = [("leaf", a) for a in parity.leaf_letters(q)]
        options += [("move",) + t[1:] for t in parity.moves(q)]
        choices[q] = options

    def extend(states, labels, children, current):
        if current == len(states):
            yield ({i: labels[i] for i in range(current)},
                   {i: children[i] for i in range(current)})
            return
        q = states[current]
        for option in choices[q]:
            if option[0] == "leaf":
                labels[current] = (option[1], q)
                children[current] = None
                yield from extend(states, labels, children, current + 1)
                continue
            _, a, q1, q2 = option
            targets1 = [i for i, s in enumerate(states) if s == q1] + [FRESH]
            targets2 = [i for i, s in enumerate(states) if s == q2] + [FRESH]
            pairs = list(cartesian(targets1, targets2))
            if q1 == q2:
                # both children on one new vertex
                pairs.append((FRESH, SHARED))
            for t1, t2 in pairs:
                grown = list(states)
                if t1 is FRESH:
                    grown.append(q1)
                    t1 = len(grown) - 1
                if t2 is SHARED:
                    t2 = t1
                elif t2 is FRESH:
                    grown.append(q2)
                    t2 = len(grown) - 1
                if len(grown) > max_vertices:
                    continue
                labels[current] = (a, q)
                children[current] = (t1, t2)
                yield from extend(grown, labels, children, current + 1)
            labels.pop(current, None)
            children.pop(current, None)

    yield from extend([parity.initial], {}, {}, 0)


@dataclass
class SemiEmptiness:
    """Nonempty with a witness tree and run, or unknown after exhausting the bound"""
    nonempty: bool
    tree: RegularTree = None
    run: RegularTree = None
    explored: int = 0


def semi_empty(aut, max_vertices):
    """Search regular runs up to a size bound for an accepted one"""
    explored = 0
    for labels, children in candidate_runs(aut, max_vertices):
        explored += 1
        run = RegularTree(root=0, labels=dict(labels), children=dict(children))
        tree = run.relabel(lambda v, lab: lab[0])
        verdict = accept_run(aut, tree, run)
        if verdict.accepted:
            logger.debug("semi-emptiness witness found after {} candidates", explored)
            return SemiEmptiness(True, tree, run, explored)
    logger.debug("no witness among {} candidates up to {} vertices", explored, max_vertices)
    return SemiEmptiness(False, explored=explored)


# Partial runs
def partial_run_in(aut, run, bound=None, starred=False):
    """
    Membership of a partial run (root and leaves unconstrained) in the sets
    used for chain transitions: every state above bound occurs only at
    vertices with finitely many descendants, and when starred the bound
    state itself occurs finitely often on every path.
    """
    try:
        check_transitions(aut.parity, run, leaves=False)
    except InvalidRun as exc:
        logger.debug("{}", exc)
        return False
    graph = run.graph()
    cyclic = set()
    for comp in nx.strongly_connected_components(graph):
        if len(comp) > 1 or any(graph.has_edge(v, v) for v in comp):
            cyclic |= comp
    # vertices that reach a cycle present nodes with infinitely many descendants
    infinite = set(cyclic)
    for v in cyclic:
        infinite |= nx.ancestors(graph, v)
    rank = aut.parity.rank
    if bound is not None:
        for v in infinite:
            if rank(run_state(run, v)) > rank(bound):
                return False
        if starred and any(run_state(run, v) == bound for v in cyclic):
            return False
    return True


def partial_run_automaton(aut):
    """Parity automaton over (letter, state) pairs accepting the partial runs of aut"""
    parity = aut.parity
    start = ("partial", "start")
    states = (start,) + tuple(parity.states)
    accepting = set(parity.accepting) | {start}
    delta0 = set()
    delta2 = set()
    for q in parity.states:
        for a in parity.alphabet:
            delta0.add((q, (a, q)))
            delta0.add((start, (a, q)))
    for q, a, q1, q2 in parity.delta2:
        delta2.add((q, (a, q), q1, q2))
        delta2.add((start, (a, q), q1, q2))
    return ParityAutomaton(states=states, initial=start, accepting=accepting,
                           delta0=delta0, delta2=delta2, name=f"{parity.name}-partial")

