"""
Core Package - Trees, counters, automata, games and their algorithms
"""
from .errors import AutomataError, FormatError
from .settings_manager import SettingsManager
from .tree_core import RegularTree, UPPath, UPWord
from .counter_core import CounterTree, ExtNat
from .parity_core import ParityAutomaton, ParityGame, solve_parity_game
from .wmsoup_core import WmsoUpAutomaton
from .maxauto import MaxAutomaton

__all__ = [
    'AutomataError', 'FormatError', 'SettingsManager',
    'RegularTree', 'UPPath', 'UPWord', 'CounterTree', 'ExtNat',
    'ParityAutomaton', 'ParityGame', 'solve_parity_game', 'WmsoUpAutomaton', 'MaxAutomaton',
]
