"""Multicore paging: a free-interleaving cache simulator with tools for comparing eviction policies."""

__version__ = "0.1.0"

from .model import MulticoreInput, SimParams, Universe, validate_input  # noqa: E402
from .engine import (  # noqa: E402
    SimResult, request_split, schedule_split, simulate_explicit, simulate_free,
)
from .policies import (  # noqa: E402
    FIF, FIFO, FWF, LRU, FWFi, Switch, check_lazy, derive_lru_like_variant, make_policy,
)
from .measures import CostMeasure, cost, makespan, miss_count, total_time  # noqa: E402
from .locality import ConcaveFunction, complement_input, is_consistent, window_profile  # noqa: E402

__all__ = [
    "MulticoreInput", "SimParams", "Universe", "validate_input",
    "SimResult", "simulate_free", "simulate_explicit", "schedule_split", "request_split",
    "LRU", "FIFO", "FWF", "FWFi", "FIF", "Switch", "make_policy", "check_lazy",
    "derive_lru_like_variant",
    "CostMeasure", "cost", "total_time", "makespan", "miss_count",
    "ConcaveFunction", "is_consistent", "window_profile", "complement_input",
]
