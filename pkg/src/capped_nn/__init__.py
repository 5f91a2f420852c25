"""Exact-arithmetic online nearest-neighbour learners on dyadic points of [0, 1].

Capped 1-nearest-neighbour (kC1NN), plain 1NN, kNN and memorisation, the
adversarial processes that separate them, partition cell counting and a
seeded Monte-Carlo harness.
"""
__version__ = "0.1.0"

from .dyadic import Dyadic, PrecisionError, compare, normalize, nth_closest_dyadic, parse
from .learners import (
    CappedNearestNeighbor,
    KNearestNeighbors,
    KnnSchedule,
    LearnerConfig,
    Memorization,
    make_learner,
)
from .processes import ScheduleParams, Trajectory, make_trajectory
from .harness import compare_learners, run_trajectory

__all__ = [
    "__version__",
    "Dyadic",
    "PrecisionError",
    "compare",
    "normalize",
    "nth_closest_dyadic",
    "parse",
    "CappedNearestNeighbor",
    "KNearestNeighbors",
    "KnnSchedule",
    "LearnerConfig",
    "Memorization",
    "make_learner",
    "ScheduleParams",
    "Trajectory",
    "make_trajectory",
    "compare_learners",
    "run_trajectory",
]
