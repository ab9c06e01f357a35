"""
Game Format - Parity games and profile sets

    game <name>
    position v0 owner=automaton priority=2 -> v1 v2

    profiles <name>
    states q0 < q1
    accepting q1
    profile - {q0}
    profile q0 {q0,q1}
"""
from core.chain_games import Profile
from core.errors import FormatError
from core.parity_core import ParityGame, Player

from .common import content_lines, format_set, header, parse_set

OWNERS = {"automaton": Player.AUTOMATON, "pathfinder": Player.PATHFINDER}


def parse_game(text, source="<game>"):
    lines = content_lines(text)
    name = header(lines, "game", source)
    game = ParityGame(name)
    edges = []
    for number, line in lines:
        keyword, _, rest = line.partition(" ")
        if keyword != "position":
            raise FormatError(f"unknown keyword {keyword!r}", source, number)
        head, arrow, targets = rest.partition("->")
        parts = head.split()
        if not parts:
            raise FormatError("position needs a name", source, number)
        attrs = dict(p.split("=", 1) for p in parts[1:] if "=" in p)
        owner = OWNERS.get(attrs.get("owner", ""))
        if owner is None:
            raise FormatError("owner must be automaton or pathfinder", source, number)
        try:
            priority = int(attrs.get("priority", ""))
        except ValueError:
            raise FormatError("priority must be a non-negative integer", source, number) from None
        if parts[0] in game.owner:
            raise FormatError(f"position {parts[0]!r} defined twice", source, number)
        game.add_position(parts[0], owner, priority)
        edges.extend((parts[0], t, number) for t in targets.split())
    for source_pos, target, number in edges:
        if target not in game.owner:
            raise FormatError(f"edge to undeclared position {target!r}", source, number)
        game.add_edge(source_pos, target)
    return game


def print_game(game):
    lines = [f"game {game.name}"]
    names = {p: (p if isinstance(p, str) else f"p{game.index(p)}") for p in game.positions}
    for p in game.positions:
        owner = "automaton" if game.owner[p] is Player.AUTOMATON else "pathfinder"
        targets = " ".join(names[t] for t in game.successors(p))
        lines.append(f"position {names[p]} owner={owner} priority={game.priority[p]} -> {targets}".rstrip())
    return "\n".join(lines) + "\n"


def parse_profiles(text, source="<profiles>"):
    """Returns (name, profiles, ordered states, accepting)"""
    lines = content_lines(text)
    name = header(lines, "profiles", source)
    states, accepting, profiles = None, set(), set()
    for number, line in lines:
        keyword, _, rest = line.partition(" ")
        if keyword == "states":
            states = tuple(s.strip() for s in rest.split("<") if s.strip())
        elif keyword == "accepting":
            accepting |= set(rest.split())
        elif keyword == "profile":
            root, _, leaves = rest.strip().partition(" ")
            members = frozenset(parse_set(leaves, source, number))
            profiles.add(Profile(None if root == "-" else root, members))
        else:
            raise FormatError(f"unknown keyword {keyword!r}", source, number)
    if states is None:
        raise FormatError("missing 'states' line", source)
    known = set(states)
    for profile in profiles:
        if (profile.root is not None and profile.root not in known) or not profile.leaves <= known:
            raise FormatError(f"profile {profile} uses undeclared states", source)
    if not accepting <= known:
        raise FormatError("accepting states must be declared", source)
    return name, profiles, states, frozenset(accepting)


def print_profiles(profiles, states, accepting, name="x"):
    lines = [f"profiles {name}", "states " + " < ".join(states)]
    if accepting:
        lines.append("accepting " + " ".join(q for q in states if q in accepting))
    for profile in sorted(profiles, key=str):
        lines.append(f"profile {'-' if profile.root is None else profile.root} {format_set(profile.leaves)}")
    return "\n".join(lines) + "\n"
