"""Runs an experiment from the command line."""

import sys

from modules.cli import main

if __name__ == "__main__":
    sys.exit(main())
