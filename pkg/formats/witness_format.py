"""
Witness Format - Witness sets for one counter

    witness <counter>
    nodes . 0 01          (addresses of a finite tree; "." is the root)
    vertices v1 v3        (presentation vertices of a regular tree)
    stage 1 = 0 1
    approximate
"""
from core.errors import FormatError
from core.flat_constructions import WitnessSet

from .common import content_lines, header

ROOT_ADDRESS = "."


def parse_address(text):
    return "" if text == ROOT_ADDRESS else text


def format_address(addr):
    return addr or ROOT_ADDRESS


def _sorted_addresses(addrs):
    return sorted(addrs, key=lambda a: (len(a), a))


def parse_witness(text, source="<witness>"):
    lines = content_lines(text)
    counter = header(lines, "witness", source)
    nodes, vertices, stages, approximate = None, None, [], False
    for number, line in lines:
        keyword, _, rest = line.partition(" ")
        if keyword == "nodes":
            nodes = frozenset(parse_address(a) for a in rest.split())
        elif keyword == "vertices":
            vertices = frozenset(rest.split())
        elif keyword == "stage":
            _, sep, members = rest.partition("=")
            if not sep:
                raise FormatError("expected 'stage <i> = <addresses>'", source, number)
            stages.append(frozenset(parse_address(a) for a in members.split()))
        elif keyword == "approximate":
            approximate = True
        else:
            raise FormatError(f"unknown keyword {keyword!r}", source, number)
    if nodes is None and vertices is None:
        raise FormatError("a witness needs a 'nodes' or a 'vertices' line", source)
    return WitnessSet(counter, nodes=nodes, vertices=vertices, stages=tuple(stages), approximate=approximate)


def print_witness(witness):
    lines = [f"witness {witness.counter}"]
    if witness.nodes is not None:
        lines.append("nodes " + " ".join(format_address(a) for a in _sorted_addresses(witness.nodes)))
    if witness.vertices is not None:
        lines.append("vertices " + " ".join(sorted(map(str, witness.vertices))))
    for i, stage in enumerate(witness.stages):
        lines.append(f"stage {i} = " + " ".join(format_address(a) for a in _sorted_addresses(stage)))
    if witness.approximate:
        lines.append("approximate")
    return "\n".join(line.rstrip() for line in lines) + "\n"
