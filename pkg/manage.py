#!/usr/bin/env python
"""Developer entry point: `./manage.py test` runs every app's suite."""
import sys

from robustbound.entry import run

if __name__ == '__main__':
    run(sys.argv)
