"""
LAR - Latest appearance records and the normal-form construction

A latest appearance record is a pair (w, v) of disjoint repetition-free
words. Reading a letter a moves it to the end: when wv = x a y the record
becomes (x, y a), otherwise (epsilon, w v a). The letters of v are exactly
the letters read since the record last had this shape.
"""
from collections import deque
from dataclasses import dataclass, field
from itertools import permutations
from math import comb, factorial

from loguru import logger

from .errors import AutomataError, NotNormalForm, UnknownLetter
from .parity_core import ParityAutomaton
from .tree_core import RegularTree
from .wmsoup_core import WmsoUpAutomaton, check_property_a


@dataclass(frozen=True)
class LarState:
    w: tuple = ()
    v: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(self.w))
        object.__setattr__(self, "v", tuple(self.v))
        letters = self.w + self.v
        if len(set(letters)) != len(letters):
            raise AutomataError(f"record {self} repeats a letter")

    def __str__(self):
        return f"{'.'.join(map(str, self.w))}|{'.'.join(map(str, self.v))}"


INITIAL_LAR = LarState()


def lar_step(state, letter, alphabet=None):
    """Record after reading one more letter"""
    if alphabet is not None and letter not in alphabet:
        raise UnknownLetter(f"letter {letter!r} is not in the alphabet")
    word = state.w + state.v
    if letter in word:
        i = word.index(letter)
        return LarState(word[:i], word[i + 1:] + (letter,))
    return LarState((), word + (letter,))


def lar_of(state):
    """Letters of the second component"""
    return frozenset(state.v)


def lar_run(word, alphabet=None):
    """Records visited while reading a finite word, starting from the empty record"""
    states = [INITIAL_LAR]
    for letter in word:
        states.append(lar_step(states[-1], letter, alphabet))
    return states


def lar_key(state, rank):
    """Sort key: longer second components are larger, ties broken lexicographically on (v, w)"""
    return (len(state.v), tuple(rank[a] for a in state.v), tuple(rank[a] for a in state.w))


def lar_states(alphabet):
    """Every record over the alphabet"""
    found = []
    letters = sorted(alphabet, key=repr)
    for n in range(len(letters) + 1):
        for word in permutations(letters, n):
            for split in range(n + 1):
                found.append(LarState(word[:split], word[split:]))
    return found


def reachable_lar_states(alphabet):
    """Records reachable from the empty one"""
    seen = {INITIAL_LAR}
    queue = deque([INITIAL_LAR])
    while queue:
        state = queue.popleft()
        for a in sorted(alphabet, key=repr):
            nxt = lar_step(state, a)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def lar_state_count(n):
    """The bound sum over k <= n of (k + 1) * k! on the records over n letters"""
    return sum((k + 1) * factorial(k) for k in range(n + 1))


def record_count(n):
    """Exact number of records over n letters"""
    return sum(comb(n, k) * factorial(k) * (k + 1) for k in range(n + 1))


# Normal form
@dataclass
class NormalFormEvidence:
    """Per-state cut and check sets of the records, and how the properties were established"""
    larcut: dict = field(default_factory=dict)
    larcheck: dict = field(default_factory=dict)
    property_a: bool = True
    property_b: str = "construction"

    def require(self, state):
        if state not in self.larcut or state not in self.larcheck:
            raise NotNormalForm(f"no normal-form evidence for state {state!r}")


@dataclass
class NormalForm:
    automaton: WmsoUpAutomaton
    evidence: NormalFormEvidence

    def larcut(self, q):
        self.evidence.require(q)
        return self.evidence.larcut[q]

    def larcheck(self, q):
        self.evidence.require(q)
        return self.evidence.larcheck[q]


def product_state_name(state):
    q, record = state
    return f"{q}[{record}]"


def normalize(aut):
    """Product of an automaton with latest appearance records over its states"""
    check_property_a(aut)
    parity = aut.parity
    rank = {q: parity.rank(q) for q in parity.states}

    def start(q):
        return (q, lar_step(INITIAL_LAR, q))

    def step(state, q):
        return (q, lar_step(state[1], q))

    initial = start(parity.initial)
    seen = {initial}
    queue = deque([initial])
    delta2 = set()
    delta0 = set()
    while queue:
        state = queue.popleft()
        q = state[0]
        for a in parity.leaf_letters(q):
            delta0.add((state, a))
        for _, a, q1, q2 in parity.moves(q):
            s1, s2 = step(state, q1), step(state, q2)
            delta2.add((state, a, s1, s2))
            for nxt in (s1, s2):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)

    states = sorted(seen, key=lambda s: (lar_key(s[1], rank), rank[s[0]]))
    accepting = {s for s in states if parity.max_state(lar_of(s[1])) in parity.accepting}
    product = ParityAutomaton(states=states, initial=initial, accepting=accepting,
                              delta0=delta0, delta2=delta2, alphabet=parity.alphabet,
                              name=f"{parity.name}-normal")
    normal = WmsoUpAutomaton(
        parity=product,
        bounded=aut.bounded,
        unbounded=aut.unbounded,
        cut={s: aut.cuts(s[0]) for s in states},
        check={s: aut.checks(s[0]) for s in states},
        ops={s: aut.counterops(s[0]) for s in states},
    )
    evidence = NormalFormEvidence(
        larcut={s: frozenset().union(*(aut.cuts(p) for p in lar_of(s[1]))) for s in states},
        larcheck={s: frozenset().union(*(aut.checks(p) for p in lar_of(s[1]))) for s in states},
    )
    logger.debug("normal form of {} has {} states (from {})", parity.name, len(states), len(parity.states))
    return NormalForm(normal, evidence)


def lift_run(normal_form, run):
    """Run of the normal form following a run of the original automaton"""
    initial = normal_form.automaton.parity.initial
    root_key = (run.root, initial[1])
    labels, children = {}, {}
    queue = deque([root_key])
    while queue:
        key = queue.popleft()
        if key in labels:
            continue
        vertex, record = key
        a, q = run.label(vertex)
        labels[key] = (a, (q, record))
        pair = run.kids(vertex)
        if not pair:
            children[key] = None
            continue
        kids = tuple((c, lar_step(record, run.label(c)[1])) for c in pair)
        children[key] = kids
        queue.extend(kids)
    return RegularTree(root=root_key, labels=labels, children=children)


def project_run(run):
    """Drop the record component of a normal-form run"""
    return run.relabel(lambda v, lab: (lab[0], lab[1][0]))
