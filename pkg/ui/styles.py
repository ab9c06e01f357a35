"""
Report Styles - Terminal rendering of command reports in human or tabular form
"""
import sys
from dataclasses import dataclass, field


# ============================================================================
# COLOR SCHEME - ANSI colors, only used when writing to a terminal
# ============================================================================

class Colors:
    """ANSI escape codes for verdict highlighting"""
    POSITIVE = "\033[32m"         # Green (accept, nonempty, member)
    NEGATIVE = "\033[31m"         # Red (reject, empty)
    UNKNOWN = "\033[33m"          # Yellow (semi-decision gave up)
    HEADING = "\033[1m"           # Bold
    DIM = "\033[2m"
    RESET = "\033[0m"


# ============================================================================
# EXIT CODES - Stable across every subcommand
# ============================================================================

class ExitCodes:
    POSITIVE = 0
    NEGATIVE = 1
    UNKNOWN = 2
    USAGE = 64


# ============================================================================
# LAYOUT - Spacing of the human format
# ============================================================================

class Layout:
    KEY_WIDTH = 18
    INDENT = "  "
    RULE = "-" * 40


@dataclass
class Report:
    """Outcome of one subcommand"""
    command: str
    verdict: str
    status: int = ExitCodes.POSITIVE
    fields: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)

    def add(self, key, value):
        self.fields.append((key, value))
        return self

    def attach(self, title, text):
        self.witnesses.append((title, text))
        return self


def _verdict_color(status):
    return {
        ExitCodes.POSITIVE: Colors.POSITIVE,
        ExitCodes.NEGATIVE: Colors.NEGATIVE,
        ExitCodes.UNKNOWN: Colors.UNKNOWN,
    }.get(status, "")


def render_human(report, color=None):
    """Aligned key/value listing followed by any witness documents"""
    if color is None:
        color = sys.stdout.isatty()
    paint = (lambda code, text: f"{code}{text}{Colors.RESET}") if color else (lambda code, text: text)
    lines = [paint(Colors.HEADING, report.command) + ": " + paint(_verdict_color(report.status), report.verdict)]
    for key, value in report.fields:
        lines.append(f"{Layout.INDENT}{key:<{Layout.KEY_WIDTH}}{value}")
    for title, text in report.witnesses:
        lines.append(paint(Colors.DIM, f"{Layout.RULE} {title}"))
        lines.append(text.rstrip("\n"))
    return "\n".join(lines) + "\n"


def render_tabular(report):
    """One tab-separated record per line: verdict, then fields, then witnesses"""
    lines = [f"verdict\t{report.verdict}"]
    for key, value in report.fields:
        lines.append(f"{key}\t{value}")
    for title, text in report.witnesses:
        lines.append(f"witness\t{title}")
        lines.extend(f"\t{line}" for line in text.rstrip("\n").splitlines())
    return "\n".join(lines) + "\n"


def render(report, output_format="human", color=None):
    if output_format == "tabular":
        return render_tabular(report)
    return render_human(report, color)
