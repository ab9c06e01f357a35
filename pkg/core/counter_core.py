"""
Counter Core - Counter operations, counter trees and counter values

A counter tree labels every node with a set of tuples
(source counter, source locus, kind, target counter, target locus), each
locus being the node itself or its parent. The value of a counter at a node
is the supremum of increments collected by walks in the configuration graph
that end at that node's configuration.
"""
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering

import networkx as nx
from loguru import logger

from .errors import AutomataError, InvalidAddress, NotRootDirected, UnknownCounter
from .tree_core import RegularTree, resolve, truncate, unfold


class Locus(Enum):
    SELF = "self"
    PARENT = "parent"


class OpKind(Enum):
    INCREMENT = "inc"
    TRANSFER = "tr"


@total_ordering
class ExtNat:
    """Natural number or the top element infinity, with saturating arithmetic"""
    __slots__ = ("_value",)

    def __init__(self, value=0):
        if isinstance(value, ExtNat):
            value = value._value
        if value is not None and (not isinstance(value, int) or value < 0):
            raise ValueError(f"not an extended natural: {value!r}")
        self._value = value

    @classmethod
    def infinity(cls):
        return cls(None)

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text in ("inf", "∞"):
            return cls.infinity()
        return cls(int(text))

    @property
    def is_infinite(self):
        return self._value is None

    @property
    def finite(self):
        """Integer value; raises on infinity"""
        if self._value is None:
            raise ValueError("infinity has no finite value")
        return self._value

    def _coerce(self, other):
        return other if isinstance(other, ExtNat) else ExtNat(other)

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_infinite or other.is_infinite:
            return INFINITY
        return ExtNat(self._value + other._value)

    __radd__ = __add__

    def __eq__(self, other):
        if isinstance(other, (int, ExtNat)):
            return self._value == self._coerce(other)._value
        return NotImplemented

    def __lt__(self, other):
        if not isinstance(other, (int, ExtNat)):
            return NotImplemented
        other = self._coerce(other)
        if self.is_infinite:
            return False
        return other.is_infinite or self._value < other._value

    def __hash__(self):
        return hash(float("inf")) if self._value is None else hash(self._value)

    def __repr__(self):
        return f"ExtNat({'inf' if self._value is None else self._value})"

    def __str__(self):
        return "inf" if self._value is None else str(self._value)


ZERO = ExtNat(0)
INFINITY = ExtNat(None)


@dataclass(frozen=True)
class CounterOp:
    """One counter operation tuple"""
    source: str
    source_locus: Locus
    kind: OpKind
    target: str
    target_locus: Locus

    def __post_init__(self):
        if Locus.SELF not in (self.source_locus, self.target_locus):
            raise AutomataError(f"counter operation {self} must involve the node itself")

    @property
    def weight(self):
        return 1 if self.kind is OpKind.INCREMENT else 0

    @property
    def root_directed(self):
        return self.source_locus is Locus.SELF and self.target_locus is Locus.PARENT

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (self.source, self.source_locus.value, self.kind.value, self.target, self.target_locus.value)

    def __str__(self):
        return (f"({self.source},{self.source_locus.value},{self.kind.value},"
                f"{self.target},{self.target_locus.value})")


def inc(source, target, source_locus=Locus.SELF, target_locus=Locus.PARENT):
    return CounterOp(source, source_locus, OpKind.INCREMENT, target, target_locus)


def tr(source, target, source_locus=Locus.SELF, target_locus=Locus.PARENT):
    return CounterOp(source, source_locus, OpKind.TRANSFER, target, target_locus)


@dataclass(frozen=True, eq=False)
class CounterTree:
    """Regular tree whose labels are frozensets of CounterOp over declared counters"""
    tree: RegularTree
    counters: tuple

    def __post_init__(self):
        object.__setattr__(self, "counters", tuple(self.counters))
        declared = set(self.counters)
        for vertex in self.tree.vertices:
            for op in self.tree.label(vertex):
                for name in (op.source, op.target):
                    if name not in declared:
                        raise UnknownCounter(f"counter {name!r} at vertex {vertex!r} is not declared")

    def ops(self, vertex):
        return self.tree.label(vertex)

    def check_counter(self, counter):
        if counter not in self.counters:
            raise UnknownCounter(f"counter {counter!r} is not declared")


# Walk suprema
def sup_walk_values(graph, initial=None):
    """
    Supremum over walks ending at each node of the summed edge weights.

    Edge weights are non-negative integers (attribute "weight"); initial maps
    nodes to a starting ExtNat (default zero). A node is infinite as soon as a
    strongly connected component with a positive internal edge reaches it.
    """
    initial = initial or {}
    cond = nx.condensation(graph)
    members = {c: cond.nodes[c]["members"] for c in cond.nodes}
    comp_of = cond.graph["mapping"]

    positive = set()
    for u, v, w in graph.edges(data="weight", default=0):
        if comp_of[u] == comp_of[v] and w > 0:
            positive.add(comp_of[u])

    comp_value = {}
    for comp in nx.topological_sort(cond):
        best = ZERO
        if comp in positive:
            best = INFINITY
        for v in members[comp]:
            best = max(best, initial.get(v, ZERO))
            for u, _, w in graph.in_edges(v, data="weight", default=0):
                if comp_of[u] != comp:
                    best = max(best, comp_value[comp_of[u]] + w)
        comp_value[comp] = best
    return {v: comp_value[comp_of[v]] for v in graph.nodes}


def _add_op_edge(graph, source, target, weight):
    if graph.has_edge(source, target):
        weight = max(weight, graph[source][target]["weight"])
    graph.add_edge(source, target, weight=weight)


# Finite trees
def config_graph(ctree, exclude=()):
    """
    Configuration graph of a finite counter tree.

    Nodes are (address, counter); exclude removes every configuration at the
    listed addresses. Tuples whose parent locus would sit above the root are
    inert.
    """
    if not ctree.tree.is_finite():
        raise InvalidAddress("the configuration graph is only built for finite trees")
    finite = unfold(ctree.tree)
    excluded = set(exclude)
    graph = nx.DiGraph()
    for addr in finite.labels:
        if addr in excluded:
            continue
        for c in ctree.counters:
            graph.add_node((addr, c))
    for addr, ops in finite.labels.items():
        for op in ops:
            here = addr
            parent = addr[:-1] if addr else None
            src = here if op.source_locus is Locus.SELF else parent
            dst = here if op.target_locus is Locus.SELF else parent
            if src is None or dst is None:
                logger.debug("tuple {} at the root refers above it; ignored", op)
                continue
            if src in excluded or dst in excluded:
                continue
            _add_op_edge(graph, (src, op.source), (dst, op.target), op.weight)
    return graph


def value_tree(ctree):
    """Map (address, counter) to its value, for every node of a finite tree"""
    return sup_walk_values(config_graph(ctree))


def value(ctree, addr, counter):
    """Value of a counter at a node of a finite counter tree"""
    ctree.check_counter(counter)
    resolve(ctree.tree, addr)
    return value_tree(ctree)[(addr, counter)]


def strict_ancestors(addr):
    return [addr[:i] for i in range(len(addr))]


def restricted_value(ctree, addr, counter, restriction):
    """Value ignoring configurations at strict ancestors of the node that lie in the set"""
    ctree.check_counter(counter)
    resolve(ctree.tree, addr)
    banned = set(strict_ancestors(addr)) & set(restriction)
    return sup_walk_values(config_graph(ctree, exclude=banned))[(addr, counter)]


def truncation_value(ctree, vertex, counter, depth):
    """Value at the root of the depth-truncated subtree from a vertex; a lower bound"""
    ctree.check_counter(counter)
    sub = CounterTree(truncate(ctree.tree.rooted_at(vertex), depth), ctree.counters)
    return value(sub, "", counter)


# Regular trees with root-directed counters
def relevant_counters(ctree, counter):
    """Counters whose values can flow into the given one"""
    closure = {counter}
    changed = True
    while changed:
        changed = False
        for vertex in ctree.tree.vertices:
            for op in ctree.ops(vertex):
                if op.target in closure and op.source not in closure:
                    closure.add(op.source)
                    changed = True
    return closure


def require_root_directed(ctree, counters):
    counters = set(counters)
    for vertex in ctree.tree.vertices:
        for op in ctree.ops(vertex):
            if (op.source in counters or op.target in counters) and not op.root_directed:
                raise NotRootDirected(f"tuple {op} at vertex {vertex!r} is not root-directed")


def downward_values(ctree, counters=None):
    """
    Map (vertex, counter) to the value of the counter at every node that
    vertex presents. Only defined when every tuple touching the relevant
    counters points from a node to its parent.
    """
    wanted = set(ctree.counters if counters is None else counters)
    relevant = set()
    for c in wanted:
        ctree.check_counter(c)
        relevant |= relevant_counters(ctree, c)
    require_root_directed(ctree, relevant)

    graph = nx.DiGraph()
    tree = ctree.tree
    for vertex in tree.vertices:
        for c in relevant:
            graph.add_node((vertex, c))
    for vertex in tree.vertices:
        pair = tree.kids(vertex)
        if not pair:
            continue
        for child in set(pair):
            for op in ctree.ops(child):
                if op.target in relevant:
                    _add_op_edge(graph, (child, op.source), (vertex, op.target), op.weight)
    values = sup_walk_values(graph)
    return {key: val for key, val in values.items() if key[1] in wanted}


def downward_value(ctree, vertex, counter):
    if vertex not in ctree.tree.labels:
        raise InvalidAddress(f"unknown vertex {vertex!r}")
    return downward_values(ctree, [counter])[(vertex, counter)]


def tail_unbounded(ctree, path, counter):
    """True iff the counter is unbounded along the infinite path"""
    values = downward_values(ctree, [counter])
    return any(values[(v, counter)].is_infinite for v in path.loop_vertices(ctree.tree))
