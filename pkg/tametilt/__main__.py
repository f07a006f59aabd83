#!/usr/bin/env python3
"""
tametilt __main__.py

Entry point for python -m tametilt execution.
"""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
