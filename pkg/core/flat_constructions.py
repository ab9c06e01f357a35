"""
Flat Constructions - Puzzles over cut/increment/reset trees and witness sets

A puzzle tree marks nodes with any of the flags cut, inc, reset and infty.
Witness sets pick nodes whose restricted counter value is large, stage by
stage, so that a counter is unbounded along a path exactly when the path
meets the set infinitely often.
"""
from dataclasses import dataclass

import networkx as nx
from loguru import logger

from .counter_core import ZERO, CounterTree, ExtNat, config_graph, downward_values, restricted_value, \
    strict_ancestors, sup_walk_values, value_tree
from .errors import AutomataError, InvalidAddress, NotRootDirected
from .tree_core import truncate

CUT = "cut"
INC = "inc"
RESET = "reset"
INFTY = "infty"
FLAGS = frozenset({CUT, INC, RESET, INFTY})


def check_flags(tree):
    for vertex in tree.vertices:
        extra = set(tree.label(vertex)) - FLAGS
        if extra:
            raise AutomataError(f"vertex {vertex!r} carries unknown flags {sorted(extra)}")


# Puzzles
def puzzle_values(tree):
    """
    Map every vertex to the sup over downward paths of the increments on a
    reset-free stretch; the path stops at cut nodes and a cut node scores 0.
    """
    check_flags(tree)
    open_vertices = [v for v in tree.vertices if CUT not in tree.label(v)]
    counting = [v for v in open_vertices if RESET not in tree.label(v)]

    # longest increment path through counting vertices, read downwards
    chain = nx.DiGraph()
    chain.add_nodes_from(counting)
    for v in counting:
        for child in set(tree.kids(v) or ()):
            if child in chain:
                chain.add_edge(child, v, weight=1 if INC in tree.label(v) else 0)
    from_below = sup_walk_values(chain, {v: ExtNat(1) if INC in tree.label(v) else ZERO for v in counting})

    score = {v: from_below.get(v, ZERO) for v in open_vertices}

    reach = nx.DiGraph()
    reach.add_nodes_from(open_vertices)
    for v in open_vertices:
        for child in set(tree.kids(v) or ()):
            if child in reach:
                reach.add_edge(child, v, weight=0)
    best = sup_walk_values(reach, score)
    return {v: best.get(v, ZERO) for v in tree.vertices}


def puzzle_value(tree, vertex):
    if vertex not in tree.labels:
        raise InvalidAddress(f"unknown vertex {vertex!r}")
    return puzzle_values(tree)[vertex]


def puzzle_member(tree):
    """True iff the infty flag marks exactly the vertices of infinite value"""
    values = puzzle_values(tree)
    return all((INFTY in tree.label(v)) == values[v].is_infinite for v in tree.vertices)


# Witness sets
@dataclass
class WitnessSet:
    """Addresses (finite trees) or vertices (regular trees) of a witness for one counter"""
    counter: str
    nodes: frozenset = None
    vertices: frozenset = None
    stages: tuple = ()
    approximate: bool = False


def _restricted_values(ctree, counter, chosen):
    """Restricted value of the counter at every node, one graph per set of chosen ancestors"""
    groups = {}
    for addr in _addresses(ctree):
        banned = frozenset(a for a in strict_ancestors(addr) if a in chosen)
        groups.setdefault(banned, []).append(addr)
    values = {}
    for banned, addrs in groups.items():
        walks = sup_walk_values(config_graph(ctree, exclude=banned))
        for addr in addrs:
            values[addr] = walks[(addr, counter)]
    return values


def _addresses(ctree):
    return [addr for addr, _ in ctree.tree.addresses()]


def _minimal(addresses):
    chosen = set(addresses)
    return {a for a in chosen if not any(b in chosen for b in strict_ancestors(a))}


def witness_stages(ctree, counter):
    """Stages X_0, X_1, ... of the witness construction on a finite counter tree"""
    ctree.check_counter(counter)
    plain = value_tree(ctree)
    finite = [v.finite for (addr, c), v in plain.items() if c == counter and not v.is_infinite]
    top = max(finite, default=0)
    stages = [frozenset({""})]
    chosen = set(stages[0])
    i = 1
    while True:
        values = _restricted_values(ctree, counter, chosen)
        if i <= top:
            stage = _minimal(a for a, v in values.items() if v >= i)
        else:
            stage = _minimal(a for a, v in values.items() if v.is_infinite and a not in chosen)
            if not stage:
                break
        stages.append(frozenset(stage))
        chosen |= stage
        i += 1
    return stages


def witness_vertices(ctree, counter):
    """Exact witness on a regular tree with root-directed counters: vertices of infinite value"""
    values = downward_values(ctree, [counter])
    return frozenset(v for v in ctree.tree.vertices if values[(v, counter)].is_infinite)


def witness_build(ctree, counter, depth=6):
    """Witness set for a counter; infinite trees without root-directed tuples are truncated"""
    ctree.check_counter(counter)
    if ctree.tree.is_finite():
        stages = witness_stages(ctree, counter)
        return WitnessSet(counter, nodes=frozenset().union(*stages), stages=tuple(stages))
    try:
        return WitnessSet(counter, vertices=witness_vertices(ctree, counter))
    except NotRootDirected:
        pass
    logger.warning("witness for counter {} on an infinite tree is approximated at depth {}", counter, depth)
    cut = CounterTree(truncate(ctree.tree, depth), ctree.counters)
    stages = witness_stages(cut, counter)
    return WitnessSet(counter, nodes=frozenset().union(*stages), stages=tuple(stages), approximate=True)


def witness_check(ctree, witness):
    """
    True iff no node outside the set has infinite restricted value and no
    infinite path stays in finite-value territory while visiting the set
    infinitely often.
    """
    counter = witness.counter
    ctree.check_counter(counter)
    if ctree.tree.is_finite():
        chosen = witness.nodes or frozenset()
        for addr in _addresses(ctree):
            if addr in chosen:
                continue
            banned = [a for a in strict_ancestors(addr) if a in chosen]
            if restricted_value(ctree, addr, counter, banned).is_infinite:
                return False
        return True

    values = downward_values(ctree, [counter])
    tree = ctree.tree
    infinite = {v for v in tree.vertices if values[(v, counter)].is_infinite}
    graph = tree.graph()
    if witness.vertices is not None:
        chosen = set(witness.vertices)
        if infinite - chosen:
            return False
        finite_part = graph.subgraph([v for v in graph if v not in infinite])
        for comp in nx.strongly_connected_components(finite_part):
            cyclic = len(comp) > 1 or any(finite_part.has_edge(v, v) for v in comp)
            if cyclic and comp & chosen:
                return False
        return True

    # a finite address set is visited finitely often on every path
    chosen = witness.nodes or frozenset()
    on_cycle = set()
    for comp in nx.strongly_connected_components(graph):
        if len(comp) > 1 or any(graph.has_edge(v, v) for v in comp):
            on_cycle |= comp
    below_cycle = set(on_cycle)
    for v in on_cycle:
        below_cycle |= nx.descendants(graph, v)
    if infinite & below_cycle:
        return False
    for addr, vertex in tree.addresses(max_depth=len(tree.labels)):
        if vertex in infinite and addr not in chosen:
            return False
    return True


def visits_infinitely_often(ctree, witness, path):
    """True iff the path meets the witness vertices infinitely often"""
    if witness.vertices is None:
        return False
    return any(v in witness.vertices for v in path.loop_vertices(ctree.tree))

