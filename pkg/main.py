"""
Automata Toolkit - Main Entry Point
Counter trees, WMSO+UP automata, parity games and max-automata
"""
import sys

from ui.cli import ToolkitCli


def main():
    sys.exit(ToolkitCli().run(sys.argv[1:]))


if __name__ == "__main__":
    main()
