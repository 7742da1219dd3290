"""
Run the experiments of the free-surface lab from the command line; see cli.py for the subcommands.
"""
import sys

from cli import main

if __name__ == '__main__':
    sys.exit(main())
