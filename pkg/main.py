"""Compatibility entrypoint for python main.py <command>."""

import sys

from wlfactor.main import main


if __name__ == "__main__":
    sys.exit(main())
