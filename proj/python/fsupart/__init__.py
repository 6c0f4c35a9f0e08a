"""Equivalent graphs, FSU selection, control partitioning and DMPC-ADMM."""

import sys

from ._fsupart import *  # noqa: F401,F403
from ._fsupart import run_cli

__all__ = [name for name in dir() if not name.startswith("_")]


def main(argv=None):
    """Console entry point; mirrors the native `fsupart` executable."""
    args = sys.argv[1:] if argv is None else list(argv)
    data = "" if sys.stdin is None or sys.stdin.isatty() else sys.stdin.read()
    status, out, err = run_cli(args, data)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return status
