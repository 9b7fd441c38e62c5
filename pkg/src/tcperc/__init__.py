"""Transitive-closure percolation on polluted graphs.

Simulation of the dynamics that occupies an open edge ``i->j`` as soon as
some ``i->k->j`` path is occupied, with seeded random environments, small
exhaustive oracles, Monte Carlo harnesses and matrix rendering.
"""

from .core import (
    NEVER,
    UNREACHABLE,
    Environment,
    Horn,
    HornVariant,
    LongestLengths,
    Trajectory,
    distances,
    edge_length,
    horns_of,
    is_abundant,
    is_saturated,
    longest_occupied_length,
    run,
    run_kd_completion,
    run_slowed,
    step,
    strongly_connected,
)
from .edgeset import EdgeSet
from .env import OpenMode, OpenModel, UniformField, open_from_field, sample_open
from .families import FamilyKind, FamilySpec, make

__version__ = "0.1.0"

__all__ = [
    "NEVER",
    "UNREACHABLE",
    "EdgeSet",
    "Environment",
    "FamilyKind",
    "FamilySpec",
    "Horn",
    "HornVariant",
    "LongestLengths",
    "OpenMode",
    "OpenModel",
    "Trajectory",
    "UniformField",
    "distances",
    "edge_length",
    "horns_of",
    "is_abundant",
    "is_saturated",
    "longest_occupied_length",
    "make",
    "open_from_field",
    "run",
    "run_kd_completion",
    "run_slowed",
    "sample_open",
    "step",
    "strongly_connected",
]
