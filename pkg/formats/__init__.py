"""
Formats Package - Text formats for trees, automata, words, games and witnesses
"""
from .automaton_format import AutomatonDocument, load_automaton, parse_automaton, print_automaton
from .game_format import parse_game, parse_profiles, print_game, print_profiles
from .tree_format import TreeDocument, load_tree, parse_tree, print_counter_tree, print_tree
from .witness_format import format_address, parse_address, parse_witness, print_witness
from .word_format import parse_letters, parse_maxauto, parse_word, print_letters, print_maxauto, print_word

__all__ = [
    'AutomatonDocument', 'load_automaton', 'parse_automaton', 'print_automaton',
    'parse_game', 'parse_profiles', 'print_game', 'print_profiles',
    'TreeDocument', 'load_tree', 'parse_tree', 'print_counter_tree', 'print_tree',
    'format_address', 'parse_address', 'parse_witness', 'print_witness',
    'parse_letters', 'parse_maxauto', 'parse_word', 'print_letters', 'print_maxauto', 'print_word',
]
