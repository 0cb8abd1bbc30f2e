"""Graphs of virtually cyclic groups: normal forms in the fundamental group,
Bass-Serre tree balls, the two kernel-quotient constructions and checkable
derivation certificates."""

from ._accel import BACKEND
from .errors import GGKError
from .gog import Graph, GraphOfGroups, validate
from .pi1 import Pi1Word, reduce
from .serialize import load, parse_document, parse_word

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "GGKError", "Graph", "GraphOfGroups", "Pi1Word", "load",
    "parse_document", "parse_word", "reduce", "validate",
]
