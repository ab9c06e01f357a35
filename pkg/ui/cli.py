"""
Toolkit CLI - Command line front end dispatching every toolkit operation
"""
import argparse
import sys
from pathlib import Path

from loguru import logger

from core.chain_games import CostFormulaContext, check_rq_transition, eval_cost_alpha, eval_cost_beta, \
    profile_game_winner
from core.counter_core import downward_value, restricted_value, tail_unbounded, \
    truncation_value, value
from core.errors import AutomataError, FormatError, NotRootDirected
from core.flat_constructions import puzzle_member, puzzle_value, puzzle_values, witness_build, witness_check
from core.lar import lar_of, lar_run, normalize
from core.maxauto import WeightedAlphabet, block_encode, eval_up, factorial_simulation, letter_word, multiply
from core.parity_core import Player, emptiness, membership, solve_parity_game
from core.settings_manager import DEFAULTS, OUTPUT_FORMATS, SettingsManager
from core.tree_core import UPPath, resolve
from core.wmsoup_core import RejectReason, accept_run, counter_free_reduct, counterops_tree, semi_empty
from formats import (format_address, load_automaton, load_tree, parse_address, parse_game, parse_letters,
                     parse_maxauto, parse_profiles, parse_witness, parse_word, print_automaton, print_counter_tree,
                     print_letters, print_tree, print_witness)
from formats.common import format_set, state_name
from formats.tree_format import COLORED, PUZZLE, RUN
from formats.word_format import load_text
from ui.styles import ExitCodes, Report, render

# rejections raised before the run is known to follow the transitions
SHAPE_REASONS = (RejectReason.LETTER, RejectReason.INITIAL, RejectReason.TRANSITION)


class ToolkitCli:
    def __init__(self, settings_manager=None):
        self.settings_manager = settings_manager or SettingsManager()
        self.parser = self.build_parser()

    # Parser
    def build_parser(self):
        parser = argparse.ArgumentParser(
            prog="automata-toolkit",
            description="Counter trees, WMSO+UP automata, parity games and max-automata")
        parser.add_argument("--format", choices=OUTPUT_FORMATS, default=None,
                            help="report format (default: output_format setting)")
        parser.add_argument("--verbose", action="store_true", help="log algorithm progress to stderr")
        parser.add_argument("--out", default=None, help="directory to write witness files into")
        sub = parser.add_subparsers(dest="command", required=True)

        # Counter trees
        p = sub.add_parser("value", help="value of a counter at a node")
        p.add_argument("tree")
        p.add_argument("--node", default=".", help="address, '.' for the root")
        p.add_argument("--counter", required=True)
        p.add_argument("--depth", type=int, default=None, help="truncation depth for non-root-directed trees")
        p.set_defaults(handler=self.cmd_value)

        p = sub.add_parser("restricted-value", help="value ignoring configurations at listed ancestors")
        p.add_argument("tree")
        p.add_argument("--node", default=".")
        p.add_argument("--counter", required=True)
        p.add_argument("--restrict", nargs="*", default=[], help="addresses of the restriction set")
        p.set_defaults(handler=self.cmd_restricted_value)

        p = sub.add_parser("tail-unbounded", help="is a counter unbounded along a path prefix:loop")
        p.add_argument("tree")
        p.add_argument("--path", required=True)
        p.add_argument("--counter", required=True)
        p.set_defaults(handler=self.cmd_tail_unbounded)

        # Automata
        p = sub.add_parser("member", help="parity membership of a regular tree")
        p.add_argument("automaton")
        p.add_argument("tree")
        p.set_defaults(handler=self.cmd_member)

        p = sub.add_parser("empty", help="parity emptiness (exit 0 when empty)")
        p.add_argument("automaton")
        p.set_defaults(handler=self.cmd_empty)

        p = sub.add_parser("accept-run", help="check a regular run of a WMSO+UP automaton")
        p.add_argument("automaton")
        p.add_argument("tree")
        p.add_argument("run")
        p.set_defaults(handler=self.cmd_accept_run)

        p = sub.add_parser("semi-empty", help="bounded search for an accepted regular run")
        p.add_argument("automaton")
        p.add_argument("--bound", type=int, default=None, help="maximum run vertices")
        p.set_defaults(handler=self.cmd_semi_empty)

        p = sub.add_parser("normalize", help="product with latest appearance records")
        p.add_argument("automaton")
        p.set_defaults(handler=self.cmd_normalize)

        p = sub.add_parser("lar-trace", help="records visited along a letter word")
        p.add_argument("letters")
        p.add_argument("--steps", type=int, default=None)
        p.add_argument("--alphabet", nargs="*", default=None)
        p.set_defaults(handler=self.cmd_lar_trace)

        # Games
        p = sub.add_parser("solve-game", help="winning regions and strategies of a parity game")
        p.add_argument("game")
        p.add_argument("--from", dest="start", default=None, help="position whose winner sets the exit code")
        p.set_defaults(handler=self.cmd_solve_game)

        p = sub.add_parser("profile-game", help="winner of the profile game")
        p.add_argument("profiles")
        p.set_defaults(handler=self.cmd_profile_game)

        # Max-automata
        p = sub.add_parser("eval-word", help="unbounded counters and acceptance on a weighted word")
        p.add_argument("maxauto")
        p.add_argument("word")
        p.set_defaults(handler=self.cmd_eval_word)

        p = sub.add_parser("block-encode", help="unary block encoding of a weighted word")
        p.add_argument("word")
        p.add_argument("--weights", nargs="*", default=None, help="weight symbols in block order")
        p.add_argument("--multiply", type=int, default=1)
        p.set_defaults(handler=self.cmd_block_encode)

        p = sub.add_parser("factorial-sim", help="evaluate a letter automaton through its block simulation")
        p.add_argument("maxauto")
        p.add_argument("word")
        p.add_argument("--weights", nargs="*", default=None)
        p.add_argument("--compare", action="store_true", help="also evaluate the scaled block encoding directly")
        p.set_defaults(handler=self.cmd_factorial_sim)

        # Flat constructions
        p = sub.add_parser("puzzle", help="puzzle membership, or the value at one node")
        p.add_argument("tree")
        p.add_argument("--node", default=None)
        p.set_defaults(handler=self.cmd_puzzle)

        p = sub.add_parser("witness-build", help="witness set for a counter")
        p.add_argument("tree")
        p.add_argument("--counter", required=True)
        p.add_argument("--depth", type=int, default=None)
        p.set_defaults(handler=self.cmd_witness_build)

        p = sub.add_parser("witness-check", help="check a witness set for a counter")
        p.add_argument("tree")
        p.add_argument("witness")
        p.set_defaults(handler=self.cmd_witness_check)

        # Chain transitions
        for name, handler, text in (
                ("check-transition", self.cmd_check_transition, "chain transition predicate"),
                ("eval-alpha", self.cmd_eval_alpha, "alpha cost of a colored run"),
                ("eval-beta", self.cmd_eval_beta, "beta cost of a colored run")):
            p = sub.add_parser(name, help=text)
            p.add_argument("tree")
            p.add_argument("descriptor", help="JSON with automaton, state and starred")
            p.set_defaults(handler=handler)

        # Settings
        p = sub.add_parser("settings", help="show, set or reset persistent settings")
        p.add_argument("action", choices=("show", "set", "reset"))
        p.add_argument("key", nargs="?")
        p.add_argument("value", nargs="?")
        p.set_defaults(handler=self.cmd_settings)
        return parser

    # Entry
    def run(self, argv):
        """Parse, dispatch and print; returns the exit status"""
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as exc:
            return ExitCodes.POSITIVE if exc.code in (0, None) else ExitCodes.USAGE
        self._configure_logging(args.verbose)
        output_format = args.format or self.settings_manager.output_format()
        try:
            report = args.handler(args)
        except FormatError as e:
            self._fail(f"parse error: {e}")
            return ExitCodes.USAGE
        except AutomataError as e:
            self._fail(f"{type(e).__name__}: {e}")
            return ExitCodes.USAGE
        except (OSError, ValueError) as e:
            self._fail(str(e))
            return ExitCodes.USAGE
        sys.stdout.write(render(report, output_format))
        return report.status

    def _configure_logging(self, verbose):
        logger.remove()
        level = "DEBUG" if verbose else self.settings_manager.log_level()
        logger.add(sys.stderr, level=level, format="<level>{level: <8}</level> | {message}")

    def _fail(self, message):
        logger.error(message)
        sys.stderr.write(f"error: {message}\n")

    def _emit(self, report, args, filename, text):
        """Attach a witness document and write it when --out is given"""
        report.attach(filename, text)
        if args.out:
            target = Path(args.out)
            target.mkdir(parents=True, exist_ok=True)
            (target / filename).write_text(text)
            logger.info("wrote {}", target / filename)

    def _track(self, *paths):
        for path in paths:
            self.settings_manager.add_recent_file(str(path))

    # Counter trees
    def _counter_tree(self, path):
        self._track(path)
        return load_tree(path).counter_tree()

    def cmd_value(self, args):
        ctree = self._counter_tree(args.tree)
        addr = parse_address(args.node)
        report = Report("value", "")
        if ctree.tree.is_finite():
            result = value(ctree, addr, args.counter)
        else:
            vertex = resolve(ctree.tree, addr)
            try:
                result = downward_value(ctree, vertex, args.counter)
            except NotRootDirected:
                depth = args.depth or self.settings_manager.witness_depth()
                logger.warning("counter {} is not root-directed; truncating at depth {}", args.counter, depth)
                result = truncation_value(ctree, vertex, args.counter, depth)
                report.add("lower-bound", f"truncation at depth {depth}")
        report.verdict = str(result)
        report.add("node", format_address(addr)).add("counter", args.counter)
        return report

    def cmd_restricted_value(self, args):
        ctree = self._counter_tree(args.tree)
        addr = parse_address(args.node)
        restriction = [parse_address(a) for a in args.restrict]
        result = restricted_value(ctree, addr, args.counter, restriction)
        report = Report("restricted-value", str(result))
        report.add("node", format_address(addr)).add("counter", args.counter)
        report.add("restriction", " ".join(format_address(a) for a in restriction) or "-")
        return report

    def cmd_tail_unbounded(self, args):
        ctree = self._counter_tree(args.tree)
        path = UPPath.parse(args.path)
        unbounded = tail_unbounded(ctree, path, args.counter)
        report = Report("tail-unbounded", "unbounded" if unbounded else "bounded",
                        ExitCodes.POSITIVE if unbounded else ExitCodes.NEGATIVE)
        return report.add("path", str(path)).add("counter", args.counter)

    # Automata
    def _automaton(self, path):
        self._track(path)
        return load_automaton(path)

    def cmd_member(self, args):
        document = self._automaton(args.automaton)
        if document.is_wmsoup:
            logger.warning("{} has counters; membership ignores them", document.name)
        tree = load_tree(args.tree).tree
        result = membership(counter_free_reduct(document.wmsoup()), tree)
        report = Report("member", "accept" if result.accepted else "reject",
                        ExitCodes.POSITIVE if result.accepted else ExitCodes.NEGATIVE)
        report.add("game positions", len(result.game))
        if result.accepted:
            self._emit(report, args, "run.tree", print_tree(result.run, "run", RUN))
        return report

    def cmd_empty(self, args):
        document = self._automaton(args.automaton)
        result = emptiness(counter_free_reduct(document.wmsoup()))
        report = Report("empty", "empty" if result.empty else "nonempty",
                        ExitCodes.POSITIVE if result.empty else ExitCodes.NEGATIVE)
        if not result.empty:
            self._emit(report, args, "witness.tree", print_tree(result.tree, "witness"))
            self._emit(report, args, "witness.run", print_tree(result.run, "run", RUN))
        return report

    def cmd_accept_run(self, args):
        aut = self._automaton(args.automaton).wmsoup()
        tree = load_tree(args.tree).tree
        run = load_tree(args.run).tree
        verdict = accept_run(aut, tree, run)
        report = Report("accept-run", verdict.describe(),
                        ExitCodes.POSITIVE if verdict.accepted else ExitCodes.NEGATIVE)
        if not verdict.accepted:
            report.add("reason", verdict.reason.value)
            if verdict.vertex is not None:
                report.add("vertex", verdict.vertex)
        if aut.counters and verdict.reason not in SHAPE_REASONS:
            self._emit(report, args, "counters.tree", print_counter_tree(counterops_tree(aut, run), "counters"))
        return report

    def cmd_semi_empty(self, args):
        aut = self._automaton(args.automaton).wmsoup()
        bound = args.bound if args.bound is not None else self.settings_manager.semi_empty_bound()
        result = semi_empty(aut, bound)
        if not result.nonempty:
            report = Report("semi-empty", "unknown", ExitCodes.UNKNOWN)
            return report.add("bound", bound).add("explored", result.explored)
        report = Report("semi-empty", "nonempty").add("bound", bound).add("explored", result.explored)
        self._emit(report, args, "witness.tree", print_tree(result.tree, "witness"))
        self._emit(report, args, "witness.run", print_tree(result.run, "run", RUN))
        return report

    def cmd_normalize(self, args):
        aut = self._automaton(args.automaton).wmsoup()
        normal = normalize(aut)
        report = Report("normalize", "normalized")
        report.add("states", f"{len(aut.parity.states)} -> {len(normal.automaton.parity.states)}")
        self._emit(report, args, "normal.aut", print_automaton(normal.automaton, normal.evidence))
        return report

    def cmd_lar_trace(self, args):
        self._track(args.letters)
        _, word = parse_letters(load_text(args.letters), args.letters)
        steps = args.steps if args.steps is not None else len(word.prefix) + 2 * len(word.loop)
        alphabet = frozenset(args.alphabet) if args.alphabet else None
        records = lar_run(word.take(steps), alphabet)
        report = Report("lar-trace", str(records[-1]))
        report.add("steps", steps).add("lar", format_set(lar_of(records[-1])))
        trace = "\n".join(f"{i} {r}" for i, r in enumerate(records))
        report.attach("trace", trace)
        return report

    # Games
    def cmd_solve_game(self, args):
        self._track(args.game)
        game = parse_game(load_text(args.game), args.game)
        solution = solve_parity_game(game)
        names = {Player.AUTOMATON: "automaton", Player.PATHFINDER: "pathfinder"}
        report = Report("solve-game", "solved")
        for player in Player:
            region = sorted(solution.regions[player], key=game.index)
            report.add(f"{names[player]} wins", " ".join(map(str, region)) or "-")
        strategy = "\n".join(f"{p} -> {solution.strategy[p]}" for p in game.positions if p in solution.strategy)
        report.attach("strategy", strategy)
        if args.start is not None:
            if args.start not in game.owner:
                raise FormatError(f"unknown position {args.start!r}", args.game)
            winner = solution.winner(args.start)
            report.verdict = f"{names[winner]} wins from {args.start}"
            report.status = ExitCodes.POSITIVE if winner is Player.AUTOMATON else ExitCodes.NEGATIVE
        return report

    def cmd_profile_game(self, args):
        self._track(args.profiles)
        _, profiles, states, accepting = parse_profiles(load_text(args.profiles), args.profiles)
        winner = profile_game_winner(profiles, states, accepting)
        won = winner is Player.AUTOMATON
        return Report("profile-game", "automaton wins" if won else "pathfinder wins",
                      ExitCodes.POSITIVE if won else ExitCodes.NEGATIVE).add("profiles", len(profiles))

    # Max-automata
    def _maxauto_and_word(self, args):
        self._track(args.maxauto, args.word)
        aut = parse_maxauto(load_text(args.maxauto), args.maxauto)
        _, word = parse_word(load_text(args.word), args.word)
        return aut, word

    @staticmethod
    def _word_alphabet(word, weights):
        positions = word.prefix + word.loop
        labels = tuple(sorted({p.label for p in positions}))
        if weights is None:
            weights = sorted({b for p in positions for b, _ in p.weights})
        return WeightedAlphabet(labels, tuple(weights))

    @staticmethod
    def _lasso_report(command, aut, verdict):
        report = Report(command, "accept" if verdict.accepted else "reject",
                        ExitCodes.POSITIVE if verdict.accepted else ExitCodes.NEGATIVE)
        report.add("unbounded", format_set(verdict.unbounded))
        counters = getattr(aut, "counters", ())
        for i, bound in sorted(verdict.bounds.items()):
            if i < len(counters) and not counters[i].endswith("^"):
                report.add(f"bound {counters[i]}", str(bound))
        report.add("period", f"{verdict.period} loop iterations from iteration {verdict.period_start}")
        return report

    def cmd_eval_word(self, args):
        aut, word = self._maxauto_and_word(args)
        return self._lasso_report("eval-word", aut, eval_up(aut, word))

    def cmd_block_encode(self, args):
        self._track(args.word)
        name, word = parse_word(load_text(args.word), args.word)
        if args.multiply != 1:
            word = multiply(word, args.multiply)
        encoded = block_encode(word, self._word_alphabet(word, args.weights))
        report = Report("block-encode", "encoded").add("prefix", len(encoded.prefix)).add("loop", len(encoded.loop))
        self._emit(report, args, f"{name}.letters", print_letters(encoded, name))
        return report

    def cmd_factorial_sim(self, args):
        aut, word = self._maxauto_and_word(args)
        alphabet = self._word_alphabet(word, args.weights)
        simulation = factorial_simulation(aut, alphabet)
        verdict = eval_up(simulation, word)
        report = self._lasso_report("factorial-sim", simulation, verdict)
        report.add("block", simulation.block)
        if args.compare:
            direct = eval_up(aut, letter_word(block_encode(multiply(word, simulation.block), alphabet)))
            report.add("direct", "accept" if direct.accepted else "reject")
            report.add("agree", "yes" if direct.accepted == verdict.accepted else "no")
        return report

    # Flat constructions
    def cmd_puzzle(self, args):
        self._track(args.tree)
        document = load_tree(args.tree)
        if document.kind != PUZZLE:
            raise FormatError("a puzzle tree needs flags= labels", args.tree)
        tree = document.tree
        if args.node is not None:
            result = puzzle_value(tree, resolve(tree, parse_address(args.node)))
            return Report("puzzle", str(result)).add("node", args.node)
        member = puzzle_member(tree)
        report = Report("puzzle", "member" if member else "not a member",
                        ExitCodes.POSITIVE if member else ExitCodes.NEGATIVE)
        values = puzzle_values(tree)
        report.attach("values", "\n".join(f"{v} {values[v]}" for v in tree.vertices))
        return report

    def cmd_witness_build(self, args):
        ctree = self._counter_tree(args.tree)
        depth = args.depth or self.settings_manager.witness_depth()
        witness = witness_build(ctree, args.counter, depth)
        report = Report("witness-build", "approximate" if witness.approximate else "built")
        size = len(witness.nodes) if witness.nodes is not None else len(witness.vertices)
        report.add("counter", args.counter).add("size", size).add("stages", len(witness.stages))
        self._emit(report, args, f"witness-{args.counter}.wit", print_witness(witness))
        return report

    def cmd_witness_check(self, args):
        ctree = self._counter_tree(args.tree)
        self._track(args.witness)
        witness = parse_witness(load_text(args.witness), args.witness)
        ok = witness_check(ctree, witness)
        return Report("witness-check", "witness" if ok else "not a witness",
                      ExitCodes.POSITIVE if ok else ExitCodes.NEGATIVE).add("counter", witness.counter)

    # Chain transitions
    def _chain_context(self, args):
        descriptor = self.settings_manager.load_descriptor(args.descriptor)
        for key in ("automaton", "state"):
            if key not in descriptor:
                raise FormatError(f"descriptor needs an {key!r} entry", args.descriptor)
        aut_path = Path(descriptor["automaton"])
        if not aut_path.is_absolute():
            aut_path = Path(args.descriptor).parent / aut_path
        normal_form = self._automaton(aut_path).normal_form()
        document = load_tree(args.tree)
        if document.kind != COLORED:
            raise FormatError("a candidate needs state= and color= labels", args.tree)
        return normal_form, descriptor["state"], bool(descriptor.get("starred", False)), document.tree

    def cmd_check_transition(self, args):
        normal_form, state, starred, candidate = self._chain_context(args)
        verdict = check_rq_transition(candidate, normal_form, state, starred)
        report = Report("check-transition", verdict.describe(),
                        ExitCodes.POSITIVE if verdict.accepted else ExitCodes.NEGATIVE)
        return report.add("state", state_name(state)).add("starred", starred).add("note", verdict.note)

    def cmd_eval_alpha(self, args):
        normal_form, state, _, run = self._chain_context(args)
        result = eval_cost_alpha(run, CostFormulaContext(normal_form, state))
        return Report("eval-alpha", str(result)).add("state", state_name(state))

    def cmd_eval_beta(self, args):
        normal_form, state, _, run = self._chain_context(args)
        result = eval_cost_beta(run, CostFormulaContext(normal_form, state))
        return Report("eval-beta", str(result)).add("state", state_name(state))

    # Settings
    def cmd_settings(self, args):
        manager = self.settings_manager
        if args.action == "reset":
            manager.reset_to_defaults()
            return Report("settings", "reset")
        if args.action == "set":
            if args.key not in DEFAULTS or args.value is None:
                raise ValueError(f"usage: settings set KEY VALUE with KEY in {', '.join(DEFAULTS)}")
            manager.set(args.key, args.value)
            return Report("settings", "saved").add(args.key, manager.get(args.key))
        report = Report("settings", "current")
        for key, current in manager.as_dict().items():
            report.add(key, current)
        return report


def main(argv=None):
    return ToolkitCli().run(sys.argv[1:] if argv is None else argv)
