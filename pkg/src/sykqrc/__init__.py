"""SYK-model quantum reservoir computing: exact-diagonalization
simulator, random-matrix chaos diagnostics, and experiment harness."""

__version__ = "0.1.0"

from . import chaoskit, ensembles, harness, hilbert, reservoir, tasks  # noqa: F401
