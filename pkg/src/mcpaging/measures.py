"""Cost measures over simulation results, and the bounded-shared-cost check."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from .engine import SimResult, simulate_free
from .model import MulticoreInput, SimParams


class BudgetError(RuntimeError):
    """An enumeration would exceed its configured budget."""


class CostMeasure(str, enum.Enum):
    TOTAL_TIME = "total-time"
    MAKESPAN = "makespan"
    MISS_COUNT = "miss-count"

    @classmethod
    def parse(cls, name) -> "CostMeasure":
        if isinstance(name, CostMeasure):
            return name
        key = str(name).strip().lower().replace("_", "-")
        for m in cls:
            if m.value == key:
                return m
        raise ValueError(f"unknown measure {name!r}")


def total_time(result: SimResult) -> int:
    return sum(result.per_core_finish)


def makespan(result: SimResult) -> int:
    return max(result.per_core_finish, default=0)


def miss_count(result: SimResult) -> int:
    return len(result.miss_events)


_MEASURES: Dict[CostMeasure, Callable[[SimResult], int]] = {
    CostMeasure.TOTAL_TIME: total_time,
    CostMeasure.MAKESPAN: makespan,
    CostMeasure.MISS_COUNT: miss_count,
}


def cost(result: SimResult, measure) -> int:
    return _MEASURES[CostMeasure.parse(measure)](result)


def extra_time(result: SimResult) -> int:
    """Timesteps beyond one per request, summed from the event log."""
    return sum(e.length - 1 + e.stall for e in result.miss_events)


def horizon_for(measure: CostMeasure, c: int, p: int) -> Optional[int]:
    """Largest total request count an input of cost <= c can have, if finite."""
    if measure is CostMeasure.TOTAL_TIME:
        return c
    if measure is CostMeasure.MAKESPAN:
        return p * c
    return None


@dataclass
class BoundednessReport:
    measure: str
    ceiling: int
    horizon: int
    counts: Dict[int, int]
    counts_extended: Dict[int, int]
    verdict: str  # "bounded" or "unbounded"
    witness: List[list] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "ceiling": self.ceiling,
            "horizon": self.horizon,
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "counts_extended": {str(k): v for k, v in sorted(self.counts_extended.items())},
            "verdict": self.verdict,
            "witness": self.witness,
        }


def _counts_up_to(policy_factory, measure, universe_size, p, params, total, c):
    from .analysis import enumerate_total  # local import: analysis builds on measures

    counts: Counter = Counter()
    for inp in enumerate_total(universe_size, p, total):
        v = cost(simulate_free(inp, policy_factory(), params), measure)
        if v <= c:
            counts[v] += 1
    return dict(counts)


def bounded_shared_cost_check(
    measure,
    policy_factory,
    universe_size: int,
    params: SimParams,
    c: int,
    p: int = 1,
    budget: int = 200_000,
) -> BoundednessReport:
    """Count inputs per cost value <= c, then extend the length horizon by one.

    The verdict is "bounded" when no cost class <= c gains members from the
    longer inputs. For miss count the horizon is not closed, so the check is
    run at horizon c and c+1 and the single-page repetition family is added
    as a witness when the counts keep growing.
    """
    m = CostMeasure.parse(measure)
    h = horizon_for(m, c, p)
    if h is None:
        h = c
    size = sum(universe_size ** n * _compositions(n, p) for n in range(h + 2))
    if size > budget:
        raise BudgetError(f"{size} inputs needed at horizon {h + 1}, budget {budget}")
    base = _counts_up_to(policy_factory, m, universe_size, p, params, h, c)
    ext = _counts_up_to(policy_factory, m, universe_size, p, params, h + 1, c)
    grows = ext != base
    witness = []
    if grows:
        verdict = "unbounded"
        if m is CostMeasure.MISS_COUNT:
            for n in range(1, 4):
                inp = MulticoreInput([[0] * n] + [[] for _ in range(p - 1)])
                res = simulate_free(inp, policy_factory(), params)
                witness.append({"input": inp.to_lists(), "cost": cost(res, m)})
    else:
        verdict = "bounded"
    return BoundednessReport(m.value, c, h, base, ext, verdict, witness)


def _compositions(n: int, p: int) -> int:
    from math import comb

    return comb(n + p - 1, p - 1)
