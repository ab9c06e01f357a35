"""
Automaton Format - Text presentation of parity and WMSO+UP automata

    wmsoup <name>                       (or: parity <name>)
    states q0 < q1 < q2
    initial q0
    accepting q2
    alphabet a b
    d0 q0 a
    d2 q0 a q1 q2
    counters bounded: c ; unbounded: d
    cut q1 = {c}
    check q2 = {d}
    ops q1 = {(c,self,inc,c,parent)}
    larcut q1 = {c}                     (normal forms only)
    larcheck q1 = {d}
"""
from dataclasses import dataclass

from core.errors import AutomataError, FormatError, NotNormalForm
from core.lar import NormalForm, NormalFormEvidence
from core.parity_core import ParityAutomaton
from core.wmsoup_core import WmsoUpAutomaton

from .common import content_lines, format_counter_ops, format_set, parse_counter_ops, parse_set, state_name


@dataclass
class AutomatonDocument:
    name: str
    automaton: object
    evidence: NormalFormEvidence = None

    @property
    def is_wmsoup(self):
        return isinstance(self.automaton, WmsoUpAutomaton)

    def wmsoup(self):
        """The document as a WMSO+UP automaton; parity automata get no counters"""
        if self.is_wmsoup:
            return self.automaton
        return WmsoUpAutomaton(parity=self.automaton)

    def normal_form(self):
        if self.evidence is None:
            raise NotNormalForm(f"automaton {self.name} carries no larcut/larcheck evidence")
        return NormalForm(self.wmsoup(), self.evidence)


def _assignment(rest, source, number):
    state, sep, value = rest.partition("=")
    if not sep:
        raise FormatError("expected '<state> = {...}'", source, number)
    return state.strip(), value.strip()


def parse_automaton(text, source="<automaton>"):
    lines = content_lines(text)
    try:
        number, first = next(lines)
    except StopIteration:
        raise FormatError("empty automaton file", source, 1) from None
    parts = first.split()
    if len(parts) != 2 or parts[0] not in ("parity", "wmsoup"):
        raise FormatError("expected 'parity <name>' or 'wmsoup <name>'", source, number)
    kind, name = parts
    states, initial, accepting, alphabet = None, None, set(), set()
    delta0, delta2 = set(), set()
    bounded, unbounded = (), ()
    cut, check, ops, larcut, larcheck = {}, {}, {}, {}, {}
    for number, line in lines:
        keyword, _, rest = line.partition(" ")
        words = rest.split()
        if keyword == "states":
            states = tuple(s.strip() for s in rest.split("<") if s.strip())
        elif keyword == "initial":
            initial = rest.strip()
        elif keyword == "accepting":
            accepting |= set(words)
        elif keyword == "alphabet":
            alphabet |= set(words)
        elif keyword == "d0":
            if len(words) != 2:
                raise FormatError("expected 'd0 <state> <letter>'", source, number)
            delta0.add(tuple(words))
        elif keyword == "d2":
            if len(words) != 4:
                raise FormatError("expected 'd2 <state> <letter> <left> <right>'", source, number)
            delta2.add(tuple(words))
        elif keyword == "counters":
            for part in rest.split(";"):
                label, _, names = part.partition(":")
                if label.strip() == "bounded":
                    bounded = tuple(names.split())
                elif label.strip() == "unbounded":
                    unbounded = tuple(names.split())
                else:
                    raise FormatError(f"unknown counter class {label.strip()!r}", source, number)
        elif keyword in ("cut", "check", "larcut", "larcheck"):
            state, value = _assignment(rest, source, number)
            table = {"cut": cut, "check": check, "larcut": larcut, "larcheck": larcheck}[keyword]
            table[state] = frozenset(parse_set(value, source, number))
        elif keyword == "ops":
            state, value = _assignment(rest, source, number)
            ops[state] = parse_counter_ops(value, source, number)
        else:
            raise FormatError(f"unknown keyword {keyword!r}", source, number)
    if states is None or initial is None:
        raise FormatError("automaton needs 'states' and 'initial' lines", source)
    try:
        parity = ParityAutomaton(states=states, initial=initial, accepting=accepting, delta0=delta0,
                                 delta2=delta2, alphabet=alphabet, name=name)
        automaton = parity
        if kind == "wmsoup":
            automaton = WmsoUpAutomaton(parity=parity, bounded=bounded, unbounded=unbounded,
                                        cut=cut, check=check, ops=ops)
        elif bounded or unbounded or cut or check or ops:
            raise FormatError("counter data needs a 'wmsoup' header", source)
    except FormatError:
        raise
    except AutomataError as e:
        raise FormatError(str(e), source) from e
    evidence = None
    if larcut or larcheck:
        evidence = NormalFormEvidence(larcut=larcut, larcheck=larcheck, property_b="declared")
    return AutomatonDocument(name, automaton, evidence)


def print_automaton(automaton, evidence=None):
    """Canonical text; normal-form states print as q[w|v]"""
    wmsoup = automaton if isinstance(automaton, WmsoUpAutomaton) else None
    parity = wmsoup.parity if wmsoup else automaton
    name = state_name
    lines = [f"{'wmsoup' if wmsoup else 'parity'} {parity.name}"]
    lines.append("states " + " < ".join(name(q) for q in parity.states))
    lines.append(f"initial {name(parity.initial)}")
    if parity.accepting:
        lines.append("accepting " + " ".join(name(q) for q in parity.states if q in parity.accepting))
    if parity.alphabet:
        lines.append("alphabet " + " ".join(sorted(map(str, parity.alphabet))))
    for q, a in sorted(parity.delta0, key=lambda t: (parity.rank(t[0]), str(t[1]))):
        lines.append(f"d0 {name(q)} {a}")
    for q, a, q1, q2 in sorted(parity.delta2, key=lambda t: (parity.rank(t[0]), str(t[1]),
                                                          parity.rank(t[2]), parity.rank(t[3]))):
        lines.append(f"d2 {name(q)} {a} {name(q1)} {name(q2)}")
    if wmsoup:
        lines.append(f"counters bounded: {' '.join(wmsoup.bounded)} ; unbounded: {' '.join(wmsoup.unbounded)}")
        for q in parity.states:
            if wmsoup.cuts(q):
                lines.append(f"cut {name(q)} = {format_set(wmsoup.cuts(q))}")
            if wmsoup.checks(q):
                lines.append(f"check {name(q)} = {format_set(wmsoup.checks(q))}")
            if wmsoup.counterops(q):
                lines.append(f"ops {name(q)} = {format_counter_ops(wmsoup.counterops(q))}")
    if evidence is not None:
        for q in parity.states:
            lines.append(f"larcut {name(q)} = {format_set(evidence.larcut.get(q, ()))}")
            lines.append(f"larcheck {name(q)} = {format_set(evidence.larcheck.get(q, ()))}")
    return "\n".join(lines) + "\n"


def load_automaton(path):
    with open(path) as f:
        return parse_automaton(f.read(), str(path))
