"""Main entry point for the IDInit experiment runner."""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
