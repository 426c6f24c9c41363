#!/usr/bin/env python
"""Memory Planning Tool."""
import sys

from memoplan.cli import main

if __name__ == '__main__':
    sys.exit(main())
