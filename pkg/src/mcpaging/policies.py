"""Eviction policies, the lazy-algorithm validator and policy constructions.

A policy sees the engine's live :class:`~mcpaging.engine.CacheState` and
returns the resident pages to evict on a full miss. Most policies here are
stateless rankings over that state; the engine keeps last-access tags and
fetch-completion times so that LRU and FIFO need no bookkeeping of their own.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .engine import FULL_MISS, CacheState, SimResult, simulate_free
from .model import MulticoreInput, Page, SimParams


class EvictionPolicy:
    name = "policy"
    offline = False

    def start(self, inp: MulticoreInput, params: SimParams) -> None:
        """Called once before every run; stateful policies reset here."""

    def observe(self, kind: str, t: int, core: int, page: Page, state: CacheState) -> None:
        """Event stream from the engine: hit, wait, evict, fetch, load."""

    def victim_order(self, state: CacheState, core: int, page: Page) -> List[Page]:
        raise NotImplementedError

    def decide_eviction(self, state: CacheState, core: int, page: Page) -> List[Page]:
        if state.free_slots > 0:
            return []
        order = self.victim_order(state, core, page)
        return order[:1]

    def tag_for_fetch(self, page: Page, t_start: int, t_end: int) -> int:
        # tags are refreshed on every fetch timestep, so the last one wins
        return t_end

    def __repr__(self) -> str:
        return f"<{self.name}>"


def _ranked(state: CacheState, key) -> List[Page]:
    """Non-hit residents in key order, followed by this timestep's hits."""
    fresh = sorted((x for x in state.tags if x not in state.hit_now), key=key)
    hit = sorted((x for x in state.tags if x in state.hit_now), key=key)
    return fresh + hit


class LRU(EvictionPolicy):
    name = "lru"

    def victim_order(self, state, core, page):
        return _ranked(state, lambda x: (state.tags[x], x))


class FIFO(EvictionPolicy):
    name = "fifo"

    def victim_order(self, state, core, page):
        return _ranked(state, lambda x: (state.loaded[x], x))


class FWF(EvictionPolicy):
    """Flush when full: a miss on a full cache empties every resident slot."""

    name = "fwf"

    def victim_order(self, state, core, page):
        return _ranked(state, lambda x: x)

    def decide_eviction(self, state, core, page):
        if state.free_slots > 0:
            return []
        return sorted(state.tags)


class FWFi(EvictionPolicy):
    """Evict ``i`` pages in the base policy's order instead of flushing."""

    def __init__(self, base: EvictionPolicy, i: int):
        if i < 1:
            raise ValueError("i must be >= 1")
        self.base = base
        self.i = i
        self.name = f"fwf_i:{base.name}:{i}"

    def start(self, inp, params):
        if self.i > params.k:
            raise ValueError(f"i={self.i} exceeds k={params.k}")
        self.base.start(inp, params)

    def observe(self, kind, t, core, page, state):
        self.base.observe(kind, t, core, page, state)

    def victim_order(self, state, core, page):
        return self.base.victim_order(state, core, page)

    def decide_eviction(self, state, core, page):
        if state.free_slots > 0:
            return []
        return self.base.victim_order(state, core, page)[: self.i]


class Switch(EvictionPolicy):
    """``first`` through timestep ``at``, ``then`` afterwards."""

    def __init__(self, first: EvictionPolicy, then: EvictionPolicy, at: float, name: str = ""):
        self.first, self.then, self.at = first, then, at
        self.name = name or f"switch({first.name}->{then.name}@{at})"

    def _pick(self, t: int) -> EvictionPolicy:
        return self.first if t <= self.at else self.then

    def start(self, inp, params):
        self.first.start(inp, params)
        self.then.start(inp, params)

    def observe(self, kind, t, core, page, state):
        self.first.observe(kind, t, core, page, state)
        self.then.observe(kind, t, core, page, state)

    def victim_order(self, state, core, page):
        return self._pick(state.clock).victim_order(state, core, page)

    def decide_eviction(self, state, core, page):
        return self._pick(state.clock).decide_eviction(state, core, page)


class FIF(EvictionPolicy):
    """Offline furthest-in-future, distances counted per core from its cursor."""

    offline = True
    name = "fif"

    def __init__(self, inp: Optional[MulticoreInput] = None):
        self.inp = inp
        self._positions: List[Dict[Page, List[int]]] = []

    def start(self, inp, params):
        if self.inp is not None and self.inp != inp:
            raise ValueError("FIF was built for a different input")
        self._positions = []
        for seq in inp.sequences:
            pos: Dict[Page, List[int]] = {}
            for idx, x in enumerate(seq):
                pos.setdefault(x, []).append(idx)
            self._positions.append(pos)

    def distance(self, state: CacheState, x: Page) -> float:
        best = math.inf
        for c, pos in enumerate(self._positions):
            idxs = pos.get(x)
            if not idxs:
                continue
            cur = state.cursors[c]
            k = bisect.bisect_left(idxs, cur)
            if k < len(idxs):
                best = min(best, idxs[k] - cur)
        return best

    def victim_order(self, state, core, page):
        # furthest first; ties by smallest id
        return _ranked(state, lambda x: (-self.distance(state, x), x))


def lru_policy() -> EvictionPolicy:
    return LRU()


def fifo_policy() -> EvictionPolicy:
    return FIFO()


def fwf_policy() -> EvictionPolicy:
    return FWF()


def fif_policy(inp: Optional[MulticoreInput] = None) -> EvictionPolicy:
    return FIF(inp)


def fwf_i_policy(base: EvictionPolicy, i: int) -> EvictionPolicy:
    return FWFi(base, i)


def fwf_i_t_policy(base_factory, i: int, t: float) -> EvictionPolicy:
    """FWF_i through timestep t, FWF_{i+1} afterwards.

    ``base_factory`` builds a fresh base policy (each half gets its own copy).
    ``t = math.inf`` gives FWF_i and ``t = 0`` gives FWF_{i+1}.
    """
    if i < 1:
        raise ValueError("i must be >= 1")
    if t < 0:
        raise ValueError("t must be >= 0")
    tname = "inf" if t == math.inf else str(int(t))
    base = base_factory()
    return Switch(FWFi(base, i), FWFi(base_factory(), i + 1), t,
                  name=f"fwf_it:{base.name}:{i}:{tname}")


_BASES = {"lru": LRU, "fifo": FIFO, "fwf": FWF}


def make_policy(spec: str, inp: Optional[MulticoreInput] = None) -> EvictionPolicy:
    """Build a policy from its registry name, e.g. ``fwf_i:lru:2``."""
    parts = spec.strip().lower().split(":")
    head = parts[0]
    try:
        if head in _BASES and len(parts) == 1:
            return _BASES[head]()
        if head == "fif" and len(parts) == 1:
            return FIF(inp)
        if head == "fwf_i" and len(parts) == 3:
            return FWFi(make_policy(parts[1], inp), int(parts[2]))
        if head == "fwf_it" and len(parts) == 4:
            t = math.inf if parts[3] in ("inf", "oo") else int(parts[3])
            return fwf_i_t_policy(lambda: make_policy(parts[1], inp), int(parts[2]), t)
    except ValueError as exc:
        raise ValueError(f"bad policy spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown policy {spec!r}")


# ---------------------------------------------------------------- laziness

LAZY_PROPERTIES = {
    1: "evicts only on a miss",
    2: "evicts no more pages than misses in a timestep",
    3: "never evicts a page hit in the same timestep",
    4: "evicts only when no space is left",
}


@dataclass
class LazinessReport:
    holds: Dict[int, bool] = field(default_factory=lambda: {i: True for i in LAZY_PROPERTIES})
    witness: Dict[int, Optional[dict]] = field(default_factory=lambda: {i: None for i in LAZY_PROPERTIES})
    inputs_checked: int = 0

    @property
    def all_hold(self) -> bool:
        return all(self.holds.values())

    def flag(self, prop: int, inp: MulticoreInput, t: int, detail: str) -> None:
        if self.holds[prop]:
            self.holds[prop] = False
            self.witness[prop] = {"input": inp.to_lists(), "t": t, "detail": detail}


def _hits_by_step(result: SimResult) -> Dict[int, List[Tuple[int, Page]]]:
    out: Dict[int, List[Tuple[int, Page]]] = {}
    for h in result.hit_events:
        out.setdefault(h.t, []).append((h.seq, h.page))
    return out


def check_lazy(policy_factory, inputs: Iterable[MulticoreInput], params: SimParams) -> LazinessReport:
    """Simulate every input and record the first violation of each lazy property."""
    rep = LazinessReport()
    for inp in inputs:
        rep.inputs_checked += 1
        res = simulate_free(inp, policy_factory(), params)
        hits = _hits_by_step(res)
        per_t: Dict[int, List] = {}
        for e in res.miss_events:
            per_t.setdefault(e.t, []).append(e)
        for t, evs in per_t.items():
            n_evict = sum(len(e.evicted) for e in evs)
            carriers = [e for e in evs if e.evicted and e.kind != FULL_MISS]
            if carriers:
                rep.flag(1, inp, t, f"eviction attached to a {carriers[0].kind}")
            if n_evict > len(evs):
                rep.flag(2, inp, t, f"{n_evict} evictions for {len(evs)} misses")
            for e in evs:
                hit_before = {pg for s, pg in hits.get(t, []) if s < e.seq}
                bad = [v for v in e.evicted if v in hit_before]
                if bad:
                    rep.flag(3, inp, t, f"evicted {bad} after a hit in the same timestep")
                if e.evicted and (e.free_before > 0 or len(e.evicted) > 1):
                    rep.flag(4, inp, t, f"evicted {list(e.evicted)} with {e.free_before} free slots")
    return rep


def is_lru_like_at(result: SimResult, lru_result: SimResult, t: int) -> bool:
    """Whether every eviction of ``result`` at timestep t is tag-based LRU's choice."""
    if result.inp != lru_result.inp or result.params != lru_result.params:
        raise ValueError("results come from different inputs or parameters")
    for a, b in zip(result.schedule, lru_result.schedule):
        if a[: t - 1] != b[: t - 1]:
            raise ValueError(f"histories diverge before timestep {t}")
    ev_a = [(e.t, e.core, e.evicted) for e in result.miss_events if e.t < t]
    ev_b = [(e.t, e.core, e.evicted) for e in lru_result.miss_events if e.t < t]
    if ev_a != ev_b:
        raise ValueError(f"eviction histories diverge before timestep {t}")
    return all(list(e.evicted) == [e.lru_choice] for e in result.evictions_at(t))


# ---------------------------------------------------- derived LRU-like variant

class LRULikeVariant(EvictionPolicy):
    """Follow ``base`` through timestep j, act like LRU at j+1, stay tag-based after.

    At j+1 every eviction takes the minimum-tag page. When that differs from
    the base's choice the pair (lru, nlru) is recorded and, from j+2 on, the
    page the base would have evicted is demoted to the evicted page's last
    access time until it is touched again. Later ties are broken by page id
    with the two pages' roles exchanged, so the variant mirrors a tag-based
    policy run on the complemented input.
    """

    def __init__(self, base: EvictionPolicy, j: int):
        self.base = base
        self.j = j
        self.name = f"lru_like({base.name}@{j})"
        self.pairs: List[Tuple[Page, Page]] = []
        self.pair_cores: List[int] = []
        self._override: Dict[Page, int] = {}
        self._swap: Dict[Page, Page] = {}

    def start(self, inp, params):
        self.base.start(inp, params)
        self.pairs = []
        self.pair_cores = []
        self._override = {}
        self._swap = {}

    def observe(self, kind, t, core, page, state):
        if t <= self.j + 1:
            self.base.observe(kind, t, core, page, state)
        if kind in ("hit", "load") and t > self.j + 1:
            self._override.pop(page, None)

    def _eff(self, state: CacheState, x: Page) -> int:
        return self._override.get(x, state.tags[x])

    def victim_order(self, state, core, page):
        t = state.clock
        if t <= self.j:
            return self.base.victim_order(state, core, page)
        if t == self.j + 1:
            return _ranked(state, lambda x: (state.tags[x], x))
        return _ranked(state, lambda x: (self._eff(state, x), self._swap.get(x, x)))

    def decide_eviction(self, state, core, page):
        t = state.clock
        if t <= self.j:
            return self.base.decide_eviction(state, core, page)
        if t == self.j + 1:
            wanted = self.base.decide_eviction(state, core, page)
            if not wanted:
                return []
            lru = state.lru_choice()
            if len(wanted) == 1 and wanted[0] != lru:
                nlru = wanted[0]
                self.pairs.append((lru, nlru))
                self.pair_cores.append(core)
                self._override[nlru] = state.tags[lru]
                self._swap[lru], self._swap[nlru] = nlru, lru
            return [lru]
        if state.free_slots > 0:
            return []
        return self.victim_order(state, core, page)[:1]


def derive_lru_like_variant(base: EvictionPolicy, j: int) -> LRULikeVariant:
    if j < 0:
        raise ValueError("j must be >= 0")
    return LRULikeVariant(base, j)
