"""
Word Format - Weighted words, letter words and max-automata

    word <name> prefix=[(a;b=2,c=inf) (a)] loop=[(a;b=1)]
    letters <name> prefix=[a b] loop=[a]

    maxauto <name>
    labels a
    weights b
    counters c d
    states s0 s1
    initial s0
    trans s0 a nz={b} inf={} -> s1 : c+=1; d+=b; c=0; d=max(c,d)
    accept {c} {}
"""
import re

from core.counter_core import ExtNat
from core.errors import AutomataError, FormatError, NondeterministicInput
from core.maxauto import (AddWeight, AssignMax, Increment, MaxAutomaton, Position, PositionProfile, Reset,
                          WeightedAlphabet, WeightedWord)
from core.tree_core import UPWord

from .common import content_lines, format_set, header, parse_attributes, parse_set

POSITION = re.compile(r"\(([^)]*)\)")
TRANSITION = re.compile(r"^(\S+)\s+(\S+)\s+nz=(\{[^}]*\})\s+inf=(\{[^}]*\})\s*->\s*(\S+)\s*(?::(.*))?$")
OPERATION = [
    (re.compile(r"^(\w+)\+=1$"), lambda m: Increment(m.group(1))),
    (re.compile(r"^(\w+)\+=(\w+)$"), lambda m: AddWeight(m.group(1), m.group(2))),
    (re.compile(r"^(\w+)=0$"), lambda m: Reset(m.group(1))),
    (re.compile(r"^(\w+)=max\((\w+),(\w+)\)$"), lambda m: AssignMax(m.group(1), m.group(2), m.group(3))),
]


def _position(text, source, line):
    label, _, weights = text.partition(";")
    pairs = []
    for item in weights.split(","):
        item = item.strip()
        if not item:
            continue
        symbol, sep, value = item.partition("=")
        if not sep:
            raise FormatError(f"weight {item!r} needs the form b=<n|inf>", source, line)
        try:
            pairs.append((symbol.strip(), ExtNat.parse(value)))
        except ValueError as e:
            raise FormatError(f"bad weight {value!r}", source, line) from e
    return Position(label.strip(), tuple(pairs))


def _positions(text, source, line):
    inner = text.strip()
    if not (inner.startswith("[") and inner.endswith("]")):
        raise FormatError("expected a bracketed list of positions", source, line)
    inner = inner[1:-1]
    if POSITION.sub("", inner).strip():
        raise FormatError(f"malformed positions {text!r}", source, line)
    return tuple(_position(p, source, line) for p in POSITION.findall(inner))


def _split_line(text, keyword, source):
    lines = content_lines(text)
    try:
        number, line = next(lines)
    except StopIteration:
        raise FormatError("empty word file", source, 1) from None
    parts = line.split(None, 2)
    if parts[0] != keyword or len(parts) < 3:
        raise FormatError(f"expected '{keyword} <name> prefix=[...] loop=[...]'", source, number)
    attrs = parse_attributes(parts[2], source, number)
    if "loop" not in attrs:
        raise FormatError("a word needs a loop", source, number)
    return parts[1], attrs, number


def parse_word(text, source="<word>"):
    """Weighted word; returns (name, WeightedWord)"""
    name, attrs, number = _split_line(text, "word", source)
    prefix = _positions(attrs.get("prefix", "[]"), source, number)
    loop = _positions(attrs["loop"], source, number)
    if not loop:
        raise FormatError("the loop cannot be empty", source, number)
    return name, WeightedWord(prefix, loop)


def parse_letters(text, source="<letters>"):
    """Ultimately periodic letter word; returns (name, UPWord)"""
    name, attrs, number = _split_line(text, "letters", source)
    prefix = attrs.get("prefix", "[]").strip("[]").split()
    loop = attrs["loop"].strip("[]").split()
    if not loop:
        raise FormatError("the loop cannot be empty", source, number)
    return name, UPWord(tuple(prefix), tuple(loop))


def print_word(word, name="w"):
    prefix = " ".join(str(p) for p in word.prefix)
    loop = " ".join(str(p) for p in word.loop)
    return f"word {name} prefix=[{prefix}] loop=[{loop}]\n"


def print_letters(word, name="w"):
    return f"letters {name} prefix=[{' '.join(map(str, word.prefix))}] loop=[{' '.join(map(str, word.loop))}]\n"


def _operations(text, source, line):
    ops = []
    for item in (text or "").split(";"):
        item = item.replace(" ", "")
        if not item:
            continue
        for pattern, build in OPERATION:
            match = pattern.match(item)
            if match:
                ops.append(build(match))
                break
        else:
            raise FormatError(f"unknown counter operation {item!r}", source, line)
    return tuple(ops)


def parse_maxauto(text, source="<maxauto>"):
    lines = content_lines(text)
    name = header(lines, "maxauto", source)
    fields = {"labels": (), "weights": (), "counters": (), "states": ()}
    initial = None
    transitions = {}
    accepting = set()
    for number, line in lines:
        keyword, _, rest = line.partition(" ")
        if keyword in fields:
            fields[keyword] = tuple(rest.split())
        elif keyword == "initial":
            initial = rest.strip()
        elif keyword == "trans":
            match = TRANSITION.match(rest.strip())
            if not match:
                raise FormatError("expected 'trans <s> <label> nz={..} inf={..} -> <s'> : ops'", source, number)
            state, label, nz, inf, target, ops = match.groups()
            profile = PositionProfile(label, frozenset(parse_set(nz, source, number)),
                                      frozenset(parse_set(inf, source, number)))
            if (state, profile) in transitions:
                raise NondeterministicInput(f"{source}:{number}: second transition from {state} on {profile}")
            transitions[(state, profile)] = (target, _operations(ops, source, number))
        elif keyword == "accept":
            for group in re.findall(r"\{[^}]*\}", rest):
                accepting.add(frozenset(parse_set(group, source, number)))
        else:
            raise FormatError(f"unknown keyword {keyword!r}", source, number)
    if initial is None:
        raise FormatError("missing 'initial' line", source)
    try:
        return MaxAutomaton(
            alphabet=WeightedAlphabet(fields["labels"], fields["weights"]),
            counters=fields["counters"], states=fields["states"], initial=initial,
            transitions=transitions, accepting=frozenset(accepting), name=name,
        )
    except AutomataError as e:
        raise FormatError(str(e), source) from e


def print_maxauto(aut):
    lines = [
        f"maxauto {aut.name}",
        "labels " + " ".join(aut.alphabet.labels),
        "weights " + " ".join(aut.alphabet.weights),
        "counters " + " ".join(aut.counters),
        "states " + " ".join(aut.states),
        f"initial {aut.initial}",
    ]
    for (state, profile), (target, ops) in sorted(aut.transitions.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
        line = f"trans {state} {profile} -> {target}"
        if ops:
            line += " : " + "; ".join(str(op) for op in ops)
        lines.append(line)
    lines.append("accept " + " ".join(format_set(s) for s in sorted(aut.accepting, key=sorted)))
    return "\n".join(lines) + "\n"


def load_text(path):
    with open(path) as f:
        return f.read()
