"""
Tree Core - Regular binary trees, addresses, paths and ultimately periodic words

A tree is presented by a finite labelled graph: every vertex carries a letter
and either no children (a leaf) or an ordered pair of children. The tree it
denotes is the unfolding of that graph from the root vertex. Addresses are
strings over "0" (left) and "1" (right).
"""
from collections import deque
from dataclasses import dataclass, field

import networkx as nx
from loguru import logger

from .errors import InvalidAddress, MalformedTree, ShapeMismatch

LEFT = "0"
RIGHT = "1"


@dataclass(frozen=True, eq=False)
class RegularTree:
    """Label-deterministic presentation of a possibly infinite binary tree"""
    root: object
    labels: dict
    children: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.root not in self.labels:
            raise MalformedTree(f"root {self.root!r} has no label")
        for vertex, pair in self.children.items():
            if vertex not in self.labels:
                raise MalformedTree(f"vertex {vertex!r} has children but no label")
            if pair is None:
                continue
            if len(pair) != 2:
                raise MalformedTree(f"vertex {vertex!r} must have zero or two children")
            for child in pair:
                if child not in self.labels:
                    raise MalformedTree(f"child {child!r} of {vertex!r} is not a vertex")
        unreachable = set(self.labels) - set(self._walk())
        if unreachable:
            raise MalformedTree(f"vertices not reachable from the root: {sorted(map(repr, unreachable))}")

    @classmethod
    def build(cls, root, labels, children):
        """Build a tree, dropping vertices the root cannot reach"""
        keep = set()
        queue = deque([root])
        while queue:
            vertex = queue.popleft()
            if vertex in keep:
                continue
            keep.add(vertex)
            pair = children.get(vertex)
            if pair:
                queue.extend(pair)
        return cls(
            root=root,
            labels={v: labels[v] for v in keep},
            children={v: tuple(children[v]) if children.get(v) else None for v in keep},
        )

    def _walk(self):
        seen = set()
        queue = deque([self.root])
        while queue:
            vertex = queue.popleft()
            if vertex in seen:
                continue
            seen.add(vertex)
            yield vertex
            pair = self.children.get(vertex)
            if pair:
                queue.extend(pair)

    # Structure
    @property
    def vertices(self):
        """Reachable vertices in breadth-first order from the root"""
        return list(self._walk())

    def label(self, vertex):
        return self.labels[vertex]

    def kids(self, vertex):
        """Children pair of a vertex, or None for a leaf"""
        return self.children.get(vertex)

    def is_leaf(self, vertex):
        return not self.children.get(vertex)

    def graph(self):
        """Presentation as a networkx DiGraph; edges record the sides they stand for"""
        g = nx.DiGraph()
        for vertex in self.vertices:
            g.add_node(vertex)
            pair = self.kids(vertex)
            if not pair:
                continue
            for side, child in zip((LEFT, RIGHT), pair):
                if g.has_edge(vertex, child):
                    g[vertex][child]["sides"] = g[vertex][child]["sides"] + side
                else:
                    g.add_edge(vertex, child, sides=side)
        return g

    def is_finite(self):
        """True iff the unfolding is finite, that is the presentation is acyclic"""
        return nx.is_directed_acyclic_graph(self.graph())

    def height(self):
        """Longest root-to-leaf address length of a finite tree"""
        if not self.is_finite():
            raise InvalidAddress("an infinite tree has no height")
        g = self.graph()
        depth = {}
        for vertex in reversed(list(nx.topological_sort(g))):
            pair = self.kids(vertex)
            depth[vertex] = 0 if not pair else 1 + max(depth[c] for c in pair)
        return depth[self.root]

    def rooted_at(self, vertex):
        """Subtree presented from another vertex"""
        return RegularTree.build(vertex, self.labels, self.children)

    def relabel(self, fn):
        """Same shape, labels mapped through fn(vertex, label)"""
        return RegularTree(
            root=self.root,
            labels={v: fn(v, lab) for v, lab in self.labels.items()},
            children=dict(self.children),
        )

    def canonical(self):
        """Same tree with vertices renumbered 0.. in breadth-first order"""
        order = {v: i for i, v in enumerate(self.vertices)}
        return RegularTree(
            root=0,
            labels={order[v]: self.labels[v] for v in order},
            children={
                order[v]: tuple(order[c] for c in self.kids(v)) if self.kids(v) else None
                for v in order
            },
        )

    def addresses(self, max_depth=None):
        """Yield (address, vertex) for every node, breadth first; finite trees need no bound"""
        if max_depth is None and not self.is_finite():
            raise InvalidAddress("an infinite tree needs a depth bound to enumerate nodes")
        queue = deque([("", self.root)])
        while queue:
            addr, vertex = queue.popleft()
            yield addr, vertex
            pair = self.kids(vertex)
            if pair and (max_depth is None or len(addr) < max_depth):
                queue.append((addr + LEFT, pair[0]))
                queue.append((addr + RIGHT, pair[1]))

    def address_of(self, target):
        """Shortest address at which a vertex occurs"""
        for addr, vertex in self.addresses(max_depth=len(self.labels)):
            if vertex == target:
                return addr
        raise InvalidAddress(f"vertex {target!r} is not reachable")


def check_address(addr):
    if any(ch not in (LEFT, RIGHT) for ch in addr):
        raise InvalidAddress(f"address {addr!r} may only contain 0 and 1")


def resolve(tree, addr):
    """Vertex presenting the node at an address"""
    check_address(addr)
    vertex = tree.root
    for depth, ch in enumerate(addr):
        pair = tree.kids(vertex)
        if not pair:
            raise InvalidAddress(f"address {addr!r} steps below a leaf at depth {depth}")
        vertex = pair[0] if ch == LEFT else pair[1]
    return vertex


def product(left, right):
    """Pairwise product of two trees with the same domain"""
    labels = {}
    children = {}
    start = (left.root, right.root)
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        if pair in labels:
            continue
        u, v = pair
        labels[pair] = (left.label(u), right.label(v))
        ku, kv = left.kids(u), right.kids(v)
        if bool(ku) != bool(kv):
            raise ShapeMismatch(f"vertex {u!r} and vertex {v!r} disagree on leafness")
        if ku:
            kids = ((ku[0], kv[0]), (ku[1], kv[1]))
            children[pair] = kids
            queue.extend(kids)
        else:
            children[pair] = None
    return RegularTree(root=start, labels=labels, children=children)


def truncate(tree, depth):
    """Finite tree keeping the nodes up to a depth; deeper nodes are dropped"""
    if depth < 0:
        raise InvalidAddress("truncation depth must be non-negative")
    labels = {}
    children = {}
    for addr, vertex in tree.addresses(max_depth=depth):
        labels[addr] = tree.label(vertex)
        if tree.kids(vertex) and len(addr) < depth:
            children[addr] = (addr + LEFT, addr + RIGHT)
        else:
            children[addr] = None
    return RegularTree(root="", labels=labels, children=children)


def unfold(tree):
    """Finite tree with one vertex per node, vertices named by address"""
    if not tree.is_finite():
        raise InvalidAddress("only finite trees can be unfolded")
    return truncate(tree, tree.height())


@dataclass(frozen=True)
class UPPath:
    """Infinite path prefix . loop^omega through a tree, as directions"""
    prefix: str
    loop: str

    def __post_init__(self):
        check_address(self.prefix)
        check_address(self.loop)
        if not self.loop:
            raise InvalidAddress("a path loop cannot be empty")

    def __str__(self):
        return f"{self.prefix}:{self.loop}"

    @classmethod
    def parse(cls, text):
        prefix, _, loop = text.partition(":")
        return cls(prefix.strip(), loop.strip())

    def loop_vertices(self, tree):
        """Vertices visited along one traversal of the loop, starting at its entry"""
        entry = resolve(tree, self.prefix)
        visited = []
        vertex = entry
        for ch in self.loop:
            visited.append(vertex)
            pair = tree.kids(vertex)
            if not pair:
                raise InvalidAddress(f"path {self} steps below a leaf")
            vertex = pair[0] if ch == LEFT else pair[1]
        if vertex != entry:
            raise InvalidAddress(f"loop of path {self} does not return to vertex {entry!r}")
        return visited


@dataclass(frozen=True)
class UPWord:
    """Ultimately periodic word prefix . loop^omega over any hashable letters"""
    prefix: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "loop", tuple(self.loop))
        if not self.loop:
            raise ValueError("an ultimately periodic word needs a non-empty loop")

    def letter(self, i):
        if i < len(self.prefix):
            return self.prefix[i]
        return self.loop[(i - len(self.prefix)) % len(self.loop)]

    def take(self, n):
        return tuple(self.letter(i) for i in range(n))

    def normalized(self):
        """Shortest prefix and primitive loop denoting the same word"""
        loop = self.loop
        n = len(loop)
        for p in range(1, n + 1):
            if n % p == 0 and loop[:p] * (n // p) == loop:
                loop = loop[:p]
                break
        prefix = self.prefix
        while prefix and prefix[-1] == loop[-1]:
            prefix = prefix[:-1]
            loop = (loop[-1],) + loop[:-1]
        return UPWord(prefix, loop)

    def same_word(self, other):
        return self.normalized() == other.normalized()


def path_word(tree, path):
    """Labels read along an infinite path, as an ultimately periodic word"""
    prefix = []
    vertex = tree.root
    for ch in path.prefix:
        prefix.append(tree.label(vertex))
        pair = tree.kids(vertex)
        if not pair:
            raise InvalidAddress(f"path {path} steps below a leaf")
        vertex = pair[0] if ch == LEFT else pair[1]
    loop = [tree.label(v) for v in path.loop_vertices(tree)]
    word = UPWord(tuple(prefix), tuple(loop)).normalized()
    logger.debug("path {} reads {}", path, word)
    return word
