"""
Errors - Exception hierarchy shared by every core module
"""


class AutomataError(Exception):
    """Base class for every error raised by the toolkit"""


class MalformedTree(AutomataError):
    """A tree presentation violates its structural invariants"""


class InvalidAddress(AutomataError):
    """An address steps below a leaf, or a path loop does not close"""


class ShapeMismatch(AutomataError):
    """Two trees that must share a domain disagree on leafness"""


class UnknownCounter(AutomataError):
    """A counter is used that the counter tree does not declare"""


class NotRootDirected(AutomataError):
    """A counter needs root-directed tuples but has others"""


class PropertyAViolated(NotRootDirected):
    """A bounded counter is not separated and root-directed"""


class InvalidRun(AutomataError):
    """A labelling by states is not consistent with the transitions"""


class MalformedAutomaton(AutomataError):
    """An automaton references undeclared states, letters or counters"""


class UnknownLetter(AutomataError):
    """A letter outside the declared alphabet was read"""


class NondeterministicInput(AutomataError):
    """A max-automaton is not total and deterministic over its alphabet"""


class MalformedTransition(AutomataError):
    """A transition tree of a generalized automaton is badly colored"""


class NotNormalForm(AutomataError):
    """Normal-form evidence is missing for the requested state"""


class FormatError(AutomataError):
    """A text file does not parse; carries the file name and line"""

    def __init__(self, message, source="<text>", line=None):
        self.source = source
        self.line = line
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")
