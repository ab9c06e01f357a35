"""
Max Automata - Deterministic counter automata over weighted words

A weighted word gives every position a label and a weight in N or infinity
for each weight symbol. A max-automaton reads one position at a time and,
depending on its state and on which weights are zero, non-zero or infinite,
moves to a new state and applies counter operations. Each operation is a
max-plus matrix over the counters plus one constant coordinate, so a whole
transition is a matrix product and lasso-shaped words can be analysed by
looking at the matrix of one period.
"""
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from loguru import logger

from .counter_core import INFINITY, ExtNat
from .errors import AutomataError, MalformedAutomaton, NondeterministicInput
from .tree_core import UPWord

NEG = -np.inf
INF_LETTER = "inf"


# Max-plus algebra
def maxplus_identity(size):
    m = np.full((size, size), NEG)
    np.fill_diagonal(m, 0.0)
    return m


def maxplus_matmul(a, b):
    """(a ⊗ b)[i, j] = max_k a[i, k] + b[k, j], with -inf absorbing"""
    with np.errstate(invalid="ignore"):
        sums = a[:, :, None] + b[None, :, :]
    absent = np.isneginf(a)[:, :, None] | np.isneginf(b)[None, :, :]
    sums = np.where(absent, NEG, sums)
    return sums.max(axis=1)


def maxplus_vecmat(vec, m):
    return maxplus_matmul(vec[None, :], m)[0]


def maxplus_power(m, exponent):
    result = maxplus_identity(m.shape[0])
    base = m
    while exponent > 0:
        if exponent & 1:
            result = maxplus_matmul(result, base)
        base = maxplus_matmul(base, base)
        exponent >>= 1
    return result


def maxplus_product(matrices, size):
    result = maxplus_identity(size)
    for m in matrices:
        result = maxplus_matmul(result, m)
    return result


def _weight_float(weight):
    return math.inf if weight.is_infinite else float(weight.finite)


# Words
@dataclass(frozen=True)
class WeightedAlphabet:
    labels: tuple
    weights: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "weights", tuple(self.weights))

    def letter_alphabet(self):
        """Letters of block encodings: labels, weight symbols and the infinity letter"""
        return WeightedAlphabet(self.labels + self.weights + (INF_LETTER,))


@dataclass(frozen=True)
class PositionProfile:
    label: str
    nonzero: frozenset = frozenset()
    infinite: frozenset = frozenset()

    def __str__(self):
        return f"{self.label} nz={{{','.join(sorted(self.nonzero))}}} inf={{{','.join(sorted(self.infinite))}}}"


@dataclass(frozen=True)
class Position:
    """One letter of a weighted word; weights not listed are zero"""
    label: str
    weights: tuple = ()

    def __post_init__(self):
        items = self.weights.items() if isinstance(self.weights, dict) else self.weights
        object.__setattr__(self, "weights", tuple(sorted((b, ExtNat(w)) for b, w in items)))

    def weight(self, symbol):
        for b, w in self.weights:
            if b == symbol:
                return w
        return ExtNat(0)

    def profile(self):
        return PositionProfile(
            self.label,
            frozenset(b for b, w in self.weights if w != 0),
            frozenset(b for b, w in self.weights if w.is_infinite),
        )

    def __str__(self):
        if not self.weights:
            return f"({self.label})"
        return f"({self.label};{','.join(f'{b}={w}' for b, w in self.weights)})"


@dataclass(frozen=True)
class WeightedWord:
    prefix: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "loop", tuple(self.loop))
        if not self.loop:
            raise ValueError("a weighted word needs a non-empty loop")

    def position(self, i):
        if i < len(self.prefix):
            return self.prefix[i]
        return self.loop[(i - len(self.prefix)) % len(self.loop)]


def letter_word(word):
    """Weighted word without weights spelling an ultimately periodic letter word"""
    return WeightedWord(tuple(Position(a) for a in word.prefix), tuple(Position(a) for a in word.loop))


def multiply(word, n):
    """Multiply every weight by a positive integer; infinity stays infinity"""
    if n < 1:
        raise ValueError("the multiplier must be a positive integer")

    def scale(p):
        return Position(p.label, tuple((b, w if w.is_infinite else ExtNat(w.finite * n)) for b, w in p.weights))

    return WeightedWord(tuple(map(scale, word.prefix)), tuple(map(scale, word.loop)))


def block_encode(word, alphabet):
    """Letter word replacing each position by its label and its weights written in unary"""
    def block(p):
        letters = [p.label]
        for b in alphabet.weights:
            w = p.weight(b)
            if w.is_infinite:
                letters.append(INF_LETTER)
            else:
                letters.extend([b] * w.finite)
        return letters

    prefix = [a for p in word.prefix for a in block(p)]
    loop = [a for p in word.loop for a in block(p)]
    return UPWord(tuple(prefix), tuple(loop))


# Counter operations
@dataclass(frozen=True)
class Increment:
    counter: str

    def __str__(self):
        return f"{self.counter}+=1"


@dataclass(frozen=True)
class AddWeight:
    counter: str
    weight: str

    def __str__(self):
        return f"{self.counter}+={self.weight}"


@dataclass(frozen=True)
class Reset:
    counter: str

    def __str__(self):
        return f"{self.counter}=0"


@dataclass(frozen=True)
class AssignMax:
    counter: str
    left: str
    right: str

    def __str__(self):
        return f"{self.counter}=max({self.left},{self.right})"


def op_matrix(op, index, position):
    """Max-plus matrix of one operation; index maps counters to rows, the last row is the constant"""
    size = len(index) + 1
    const = size - 1
    m = maxplus_identity(size)
    c = index[op.counter]
    if isinstance(op, Increment):
        m[c, c] = 1.0
    elif isinstance(op, AddWeight):
        m[c, c] = _weight_float(position.weight(op.weight))
    elif isinstance(op, Reset):
        m[:, c] = NEG
        m[const, c] = 0.0
    elif isinstance(op, AssignMax):
        m[:, c] = NEG
        m[index[op.left], c] = 0.0
        m[index[op.right], c] = 0.0
    else:
        raise AutomataError(f"unknown counter operation {op!r}")
    return m


def apply_ops(ops, values, position):
    """Concrete semantics of a sequence of operations on a valuation"""
    values = dict(values)
    for op in ops:
        if isinstance(op, Increment):
            values[op.counter] += 1
        elif isinstance(op, AddWeight):
            values[op.counter] += _weight_float(position.weight(op.weight))
        elif isinstance(op, Reset):
            values[op.counter] = 0
        elif isinstance(op, AssignMax):
            values[op.counter] = max(values[op.left], values[op.right])
    return values


# Automata
@dataclass(eq=False)
class MaxAutomaton:
    """Deterministic max-automaton; a missing transition keeps the state and does nothing"""
    alphabet: WeightedAlphabet
    counters: tuple
    states: tuple
    initial: str
    transitions: dict
    accepting: frozenset
    name: str = "maxauto"
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.counters = tuple(self.counters)
        self.states = tuple(self.states)
        self.accepting = frozenset(frozenset(s) for s in self.accepting)
        known = set(self.counters)
        if self.initial not in self.states:
            raise MalformedAutomaton(f"initial state {self.initial!r} is not declared")
        for (state, profile), (target, ops) in self.transitions.items():
            if state not in self.states or target not in self.states:
                raise MalformedAutomaton(f"transition {state} -> {target} uses undeclared states")
            for op in ops:
                named = {getattr(op, k) for k in ("counter", "left", "right") if hasattr(op, k)}
                if not named <= known:
                    raise MalformedAutomaton(f"operation {op} uses undeclared counters")
                if isinstance(op, AddWeight) and op.weight not in self.alphabet.weights:
                    raise MalformedAutomaton(f"operation {op} uses an undeclared weight symbol")
        for accepted in self.accepting:
            if not accepted <= known:
                raise MalformedAutomaton("acceptance sets must name declared counters")
        self._index = {c: i for i, c in enumerate(self.counters)}

    @property
    def dimension(self):
        return len(self.counters)

    def transition(self, state, profile):
        found = self.transitions.get((state, profile))
        if found is None:
            logger.debug("{}: no transition from {} on {}; staying put", self.name, state, profile)
            return state, ()
        return found

    def step(self, state, position):
        """Next state and max-plus matrix for reading one position"""
        key = (state, position)
        if key not in self._cache:
            target, ops = self.transition(state, position.profile())
            matrix = maxplus_product((op_matrix(op, self._index, position) for op in ops),
                                     self.dimension + 1)
            self._cache[key] = (target, matrix)
        return self._cache[key]

    def report(self, unbounded):
        """Counters reported unbounded, from internal coordinates"""
        return frozenset(self.counters[i] for i in unbounded)

    def accepts(self, reported):
        return frozenset(reported) in self.accepting


def simulate(aut, word, steps):
    """Valuations after each of the first steps positions; infinity is math.inf"""
    state = aut.initial
    values = {c: 0 for c in aut.counters}
    trace = []
    for i in range(steps):
        position = word.position(i)
        state, ops = aut.transition(state, position.profile())
        values = apply_ops(ops, values, position)
        trace.append(values)
    return trace


# Lasso analysis
@dataclass
class LassoVerdict:
    """
    Counters unbounded along the word, the acceptance outcome, and for every
    bounded internal coordinate a bound that holds from position stable_from on.
    """
    unbounded: frozenset
    accepted: bool
    bounds: dict
    stable_from: int
    period_start: int
    period: int


def _descendants(graph, node):
    return {node} | nx.descendants(graph, node)


def _unbounded_at_boundaries(graph, start):
    """Coordinates whose values at period boundaries are unbounded"""
    cond = nx.condensation(graph)
    comp_of = cond.graph["mapping"]
    positive = set()
    cyclic = set()
    for u, v, w in graph.edges(data="weight"):
        if comp_of[u] == comp_of[v]:
            if w > 0:
                positive.add(comp_of[u])
    for comp in cond.nodes:
        members = cond.nodes[comp]["members"]
        if len(members) > 1 or any(graph.has_edge(x, x) for x in members):
            cyclic |= members

    unbounded = set()
    for x in graph.nodes:
        if comp_of[x] in positive:
            unbounded |= _descendants(graph, x)
    for s in graph.nodes:
        if math.isinf(start[s]) and start[s] > 0:
            for y in cyclic & _descendants(graph, s):
                unbounded |= _descendants(graph, y)
    from_cycles = set()
    for y in cyclic:
        from_cycles |= _descendants(graph, y)
    for u, v, w in graph.edges(data="weight"):
        if math.isinf(w):
            for y in cyclic & _descendants(graph, v):
                unbounded |= _descendants(graph, y)
            if u in from_cycles:
                unbounded |= _descendants(graph, v)
    return unbounded


def _boundary_bounds(graph, start, unbounded):
    """Longest-walk bounds for bounded coordinates, from starting values"""
    sub = graph.subgraph([x for x in graph.nodes if x not in unbounded])
    cond = nx.condensation(sub)
    comp_of = cond.graph["mapping"]
    value = {}
    for comp in nx.topological_sort(cond):
        best = -math.inf
        for x in cond.nodes[comp]["members"]:
            best = max(best, start[x])
            for u, _, w in sub.in_edges(x, data="weight"):
                if comp_of[u] != comp:
                    best = max(best, value[comp_of[u]] + w)
        value[comp] = best
    return {x: value[comp_of[x]] for x in sub.nodes}


def eval_up(aut, word):
    """Counters unbounded along an ultimately periodic weighted word, and acceptance"""
    size = aut.dimension + 1
    const = size - 1
    state = aut.initial
    vec = np.zeros(size)
    for position in word.prefix:
        state, m = aut.step(state, position)
        vec = maxplus_vecmat(vec, m)

    seen = {}
    boundary_vectors = []
    while state not in seen:
        seen[state] = len(boundary_vectors)
        boundary_vectors.append(vec)
        for position in word.loop:
            state, m = aut.step(state, position)
            vec = maxplus_vecmat(vec, m)
    first = seen[state]
    repeats = len(boundary_vectors) - first

    partials = []
    running = maxplus_identity(size)
    for _ in range(repeats):
        for position in word.loop:
            state, m = aut.step(state, position)
            running = maxplus_matmul(running, m)
            partials.append(running)
    period_matrix = running

    graph = nx.DiGraph()
    graph.add_nodes_from(range(size))
    for i in range(size):
        for j in range(size):
            if period_matrix[i, j] > NEG:
                graph.add_edge(i, j, weight=period_matrix[i, j])
    start = boundary_vectors[first]
    boundary = _unbounded_at_boundaries(graph, start)
    unbounded = set(boundary)
    for p in partials:
        for c in range(size):
            column = p[:, c]
            if np.isposinf(column).any() or any(column[d] > NEG for d in boundary):
                unbounded.add(c)
    unbounded.discard(const)

    settled = maxplus_vecmat(start, maxplus_power(period_matrix, size))
    at_boundaries = _boundary_bounds(graph, settled, boundary)
    bounds = {}
    for c in range(size - 1):
        if c in unbounded:
            continue
        best = at_boundaries.get(c, -math.inf)
        for p in partials:
            for s, b in at_boundaries.items():
                if p[s, c] > NEG:
                    best = max(best, b + p[s, c])
        bounds[c] = INFINITY if math.isinf(best) else ExtNat(int(best))

    reported = aut.report(unbounded)
    stable_from = len(word.prefix) + (first + size * repeats) * len(word.loop)
    logger.debug("{}: period of {} loop iterations from iteration {}, unbounded {}",
                 aut.name, repeats, first, sorted(reported))
    return LassoVerdict(
        unbounded=reported,
        accepted=aut.accepts(reported),
        bounds=bounds,
        stable_from=stable_from,
        period_start=first,
        period=repeats,
    )


# Factorial simulation
def _extend(m, n):
    """Matrix over (counters, shadows, constant) applying m and raising each shadow to its counter"""
    ext = np.full((2 * n + 1, 2 * n + 1), NEG)
    ext[:n, :n] = m[:n, :n]
    ext[:n, n:2 * n] = m[:n, :n]
    ext[n:2 * n, n:2 * n] = maxplus_identity(n)
    ext[2 * n, :n] = m[n, :n]
    ext[2 * n, n:2 * n] = m[n, :n]
    ext[2 * n, 2 * n] = 0.0
    return ext


def _shadow_reset(n):
    ext = np.full((2 * n + 1, 2 * n + 1), NEG)
    ext[:n, :n] = maxplus_identity(n)
    ext[:n, n:2 * n] = maxplus_identity(n)
    ext[2 * n, 2 * n] = 0.0
    return ext


@dataclass(eq=False)
class BlockAutomaton:
    """
    Max-automaton over weighted words that reads each weight m of a symbol b
    as the block b^(m * n!) of a letter automaton with n states. Shadow
    counters record the largest value each counter reaches inside a position.
    """
    base: MaxAutomaton
    alphabet: WeightedAlphabet
    block: int
    name: str = "block"
    _letters: dict = field(default_factory=dict, repr=False)
    _runs: dict = field(default_factory=dict, repr=False)
    _steps: dict = field(default_factory=dict, repr=False)

    @property
    def initial(self):
        return self.base.initial

    @property
    def states(self):
        return self.base.states

    @property
    def counters(self):
        return self.base.counters + tuple(f"{c}^" for c in self.base.counters)

    @property
    def dimension(self):
        return 2 * self.base.dimension

    def _letter(self, state, letter):
        key = (state, letter)
        if key not in self._letters:
            target, m = self.base.step(state, Position(letter))
            self._letters[key] = (target, _extend(m, self.base.dimension))
        return self._letters[key]

    def _repeat(self, state, letter, count):
        """Extended matrix and end state of reading letter count times from state"""
        size = self.dimension + 1
        trail = [state]
        mats = []
        index = {state: 0}
        while True:
            target, m = self._letter(trail[-1], letter)
            mats.append(m)
            if target in index:
                break
            index[target] = len(trail)
            trail.append(target)
        mu = index[target]
        lam = len(trail) - mu

        def after(k):
            return trail[k] if k < len(trail) else trail[mu + (k - mu) % lam]

        if count <= len(mats):
            return maxplus_product(mats[:count], size), after(count)
        transient = maxplus_product(mats[:mu], size)
        cycle = mats[mu:]
        laps, rest = divmod(count - mu, lam)
        result = maxplus_matmul(transient, maxplus_power(maxplus_product(cycle, size), laps))
        result = maxplus_matmul(result, maxplus_product(cycle[:rest], size))
        return result, after(count)

    def _weight_block(self, state, letter, multiple):
        key = (state, letter)
        if key not in self._runs:
            first, middle = self._repeat(state, letter, self.block)
            again, back = self._repeat(middle, letter, self.block)
            if back != middle:
                raise AutomataError("block length is not a multiple of the letter cycle")
            self._runs[key] = (first, middle, again)
        first, middle, again = self._runs[key]
        return maxplus_matmul(first, maxplus_power(again, multiple - 1)), middle

    def step(self, state, position):
        key = (state, position)
        if key in self._steps:
            return self._steps[key]
        n = self.base.dimension
        matrix = _shadow_reset(n)
        current, m = self._letter(state, position.label)
        matrix = maxplus_matmul(matrix, m)
        for b in self.alphabet.weights:
            w = position.weight(b)
            if w.is_infinite:
                current, m = self._letter(current, INF_LETTER)
            elif w.finite > 0:
                m, current = self._weight_block(current, b, w.finite)
            else:
                continue
            matrix = maxplus_matmul(matrix, m)
        self._steps[key] = (current, matrix)
        return current, matrix

    def report(self, unbounded):
        n = self.base.dimension
        return frozenset(c for i, c in enumerate(self.base.counters) if n + i in unbounded)

    def accepts(self, reported):
        return self.base.accepts(reported)


def factorial_simulation(aut, alphabet):
    """Max-automaton over weighted words equivalent to aut on block encodings scaled by n!"""
    letters = alphabet.letter_alphabet().labels
    for state in aut.states:
        for letter in letters:
            if (state, PositionProfile(letter)) not in aut.transitions:
                raise NondeterministicInput(
                    f"{aut.name} has no transition from {state!r} on block letter {letter!r}")
    block = math.factorial(len(aut.states))
    logger.debug("simulating {} with blocks of length {}", aut.name, block)
    return BlockAutomaton(base=aut, alphabet=alphabet, block=block, name=f"{aut.name}-block")
