"""
UI Package - Command line interface and report styling
"""
from .cli import ToolkitCli, main
from .styles import ExitCodes, Report, render

__all__ = ['ToolkitCli', 'main', 'ExitCodes', 'Report', 'render']
