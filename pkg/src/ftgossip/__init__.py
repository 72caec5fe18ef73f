"""Exact finite-time average consensus by pairwise gossip."""
from .core import A, GossipMatrix, GossipStep, Mode, S, Schedule, ScheduleError
from .exact import Dyadic, chi
from .kernels import BACKEND
from .schedules import build_asymmetric, build_hypercube

__version__ = "0.1.0"

__all__ = [
    "A",
    "BACKEND",
    "Dyadic",
    "GossipMatrix",
    "GossipStep",
    "Mode",
    "S",
    "Schedule",
    "ScheduleError",
    "build_asymmetric",
    "build_hypercube",
    "chi",
]
