"""
Common - Line and attribute helpers shared by the text formats
"""
import re

from core.counter_core import CounterOp, Locus, OpKind
from core.errors import AutomataError, FormatError
from core.lar import LarState, product_state_name

ATTRIBUTE = re.compile(r"(\w+)=(\{[^}]*\}|\[[^\]]*\]|\S+)")


def content_lines(text):
    """Yield (line number, stripped line), skipping blanks and # comments"""
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def parse_attributes(text, source, line):
    """key=value pairs; values may be braced sets or bracketed lists"""
    attrs = {}
    rest = ATTRIBUTE.sub("", text).strip()
    if rest:
        raise FormatError(f"unexpected text {rest!r}", source, line)
    for key, value in ATTRIBUTE.findall(text):
        if key in attrs:
            raise FormatError(f"attribute {key!r} given twice", source, line)
        attrs[key] = value
    return attrs


def parse_set(text, source, line):
    """Items of a braced, comma separated set"""
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise FormatError(f"expected a braced set, got {text!r}", source, line)
    inner = text[1:-1].strip()
    return [item.strip() for item in inner.split(",") if item.strip()] if inner else []


def format_set(items):
    return "{" + ",".join(sorted(str(i) for i in items)) + "}"


def state_name(state):
    """Printable name of a state; normal-form states print as q[w|v]"""
    if isinstance(state, tuple) and len(state) == 2 and isinstance(state[1], LarState):
        return product_state_name(state)
    return str(state)


def header(lines, keyword, source):
    """Consume the leading '<keyword> <name>' line"""
    try:
        number, line = next(lines)
    except StopIteration:
        raise FormatError(f"empty file, expected '{keyword} <name>'", source, 1) from None
    parts = line.split()
    if parts[0] != keyword or len(parts) != 2:
        raise FormatError(f"expected '{keyword} <name>'", source, number)
    return parts[1]


COUNTER_OP = re.compile(r"\(\s*(\w+)\s*,\s*(self|parent)\s*,\s*(inc|tr)\s*,\s*(\w+)\s*,\s*(self|parent)\s*\)")


def parse_counter_ops(text, source, line):
    """Braced set of (c,self,inc,d,parent) tuples"""
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise FormatError(f"expected a braced set of tuples, got {text!r}", source, line)
    inner = text[1:-1]
    if COUNTER_OP.sub("", inner).replace(",", "").strip():
        raise FormatError(f"malformed counter operation in {text!r}", source, line)
    ops = set()
    for src, src_locus, kind, dst, dst_locus in COUNTER_OP.findall(inner):
        try:
            ops.add(CounterOp(src, Locus(src_locus), OpKind(kind), dst, Locus(dst_locus)))
        except AutomataError as e:
            raise FormatError(str(e), source, line) from e
    return frozenset(ops)


def format_counter_ops(ops):
    return "{" + ",".join(str(op) for op in sorted(ops)) + "}"
