"""
Tree Format - Text presentation of regular trees

    tree <name>
    counters c d
    node <id> label=<letter> left=<id|-> right=<id|-> [state=<q>] [color=<q|->]
    node <id> ops={(c,self,inc,c,parent)} left=- right=-
    node <id> flags={inc,cut} left=- right=-
    root <id>
"""
from dataclasses import dataclass

from core.counter_core import CounterOp, CounterTree
from core.errors import AutomataError, FormatError
from core.tree_core import RegularTree

from .common import (content_lines, format_counter_ops, format_set, header, parse_attributes,
                     parse_counter_ops, parse_set, state_name)

PLAIN = "plain"
RUN = "run"
COLORED = "colored"
COUNTER = "counter"
PUZZLE = "puzzle"


@dataclass
class TreeDocument:
    name: str
    tree: RegularTree
    kind: str
    counters: tuple = ()

    def counter_tree(self):
        if self.kind != COUNTER:
            raise AutomataError(f"tree {self.name} carries no counter operations")
        return CounterTree(self.tree, self.counters)


def _kind(attrs):
    if "flags" in attrs:
        return PUZZLE
    if "ops" in attrs:
        return COUNTER
    if "color" in attrs:
        return COLORED
    if "state" in attrs:
        return RUN
    return PLAIN


def _label(kind, attrs, source, line):
    if kind == PUZZLE:
        return frozenset(parse_set(attrs["flags"], source, line))
    if kind == COUNTER:
        return parse_counter_ops(attrs["ops"], source, line)
    if "label" not in attrs:
        raise FormatError("node needs a label", source, line)
    base = attrs["label"]
    if "state" in attrs:
        base = (base, attrs["state"])
    if kind == COLORED:
        color = attrs["color"]
        return (base, None if color == "-" else color)
    return base


def parse_tree(text, source="<tree>"):
    """Parse a tree document; every node must use the same kind of label"""
    lines = content_lines(text)
    name = header(lines, "tree", source)
    counters = ()
    labels, children = {}, {}
    root = None
    kind = None
    for number, line in lines:
        keyword, _, rest = line.partition(" ")
        if keyword == "counters":
            counters = tuple(rest.split())
        elif keyword == "root":
            root = rest.strip()
        elif keyword == "node":
            ident, _, attr_text = rest.strip().partition(" ")
            if ident in labels:
                raise FormatError(f"node {ident!r} defined twice", source, number)
            attrs = parse_attributes(attr_text, source, number)
            node_kind = _kind(attrs)
            if kind is None:
                kind = node_kind
            elif kind != node_kind:
                raise FormatError(f"node {ident!r} is a {node_kind} node in a {kind} tree", source, number)
            labels[ident] = _label(kind, attrs, source, number)
            left, right = attrs.get("left", "-"), attrs.get("right", "-")
            if (left == "-") != (right == "-"):
                raise FormatError(f"node {ident!r} must have zero or two children", source, number)
            children[ident] = None if left == "-" else (left, right)
        else:
            raise FormatError(f"unknown keyword {keyword!r}", source, number)
    if root is None:
        raise FormatError("missing 'root <id>' line", source)
    try:
        tree = RegularTree(root=root, labels=labels, children=children)
    except AutomataError as e:
        raise FormatError(str(e), source) from e
    if counters and kind not in (COUNTER, None):
        raise FormatError("a counters line needs ops= labels", source)
    return TreeDocument(name, tree, kind or PLAIN, counters)


def _label_attrs(kind, label):
    if kind == PUZZLE:
        return f"flags={format_set(label)}"
    if kind == COUNTER:
        return f"ops={format_counter_ops(label)}"
    color = None
    if kind == COLORED:
        label, color = label
    parts = []
    if kind in (RUN, COLORED) and isinstance(label, tuple):
        parts.append(f"label={label[0]} state={state_name(label[1])}")
    else:
        parts.append(f"label={label}")
    if kind == COLORED:
        parts.append(f"color={'-' if color is None else state_name(color)}")
    return " ".join(parts)


def detect_kind(tree, counters=()):
    """Guess the document kind from the labels; callers that know it pass it explicitly"""
    label = tree.label(tree.root)
    if isinstance(label, frozenset):
        items = [x for v in tree.vertices for x in tree.label(v)]
        if any(isinstance(x, CounterOp) for x in items) or (not items and counters):
            return COUNTER
        return PUZZLE
    if isinstance(label, tuple) and len(label) == 2:
        return COLORED if isinstance(label[0], tuple) else RUN
    return PLAIN


def print_tree(tree, name="t", kind=None, counters=()):
    """Canonical text of a tree; vertices are renumbered breadth first"""
    kind = kind or detect_kind(tree, counters)
    canon = tree.canonical()
    lines = [f"tree {name}"]
    if kind == COUNTER:
        lines.append("counters " + " ".join(counters))
    for vertex in canon.vertices:
        pair = canon.kids(vertex)
        left, right = (pair[0], pair[1]) if pair else ("-", "-")
        lines.append(f"node {vertex} {_label_attrs(kind, canon.label(vertex))} left={left} right={right}")
    lines.append(f"root {canon.root}")
    return "\n".join(lines) + "\n"


def print_counter_tree(ctree, name="t"):
    return print_tree(ctree.tree, name, COUNTER, ctree.counters)


def load_tree(path):
    with open(path) as f:
        return parse_tree(f.read(), str(path))
