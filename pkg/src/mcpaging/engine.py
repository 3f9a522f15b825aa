"""Discrete-time execution of a multicore input under an eviction policy.

Free-interleaving mode: every core advances on its own; a miss stalls only
the missing core for the fetch delay. Within a timestep cores are handled in
ascending index and the effects of earlier cores (tag updates, reservations,
evictions) are visible to later ones.

Timesteps are 1-based everywhere in this module's public surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .model import MulticoreInput, Page, SimParams

FULL_MISS = "FullMiss"
SHARED_WAIT = "SharedWait"


class PolicyContractError(RuntimeError):
    """A policy asked for something the cache cannot do."""


@dataclass(frozen=True)
class MissEvent:
    seq: int  # global event order
    t: int
    core: int  # 0-based internally, rendered 1-based
    page: Page
    kind: str
    length: int  # timesteps this request occupies the core
    evicted: Tuple[Page, ...] = ()
    lru_choice: Optional[Page] = None  # what tag-based LRU would evict here
    free_before: int = 0  # empty slots when the decision was made
    stall: int = 0  # timesteps lost because every slot was reserved (k < p only)
    index: int = -1  # 0-based position of the request in its core's sequence


@dataclass(frozen=True)
class HitEvent:
    seq: int
    t: int
    core: int
    page: Page
    index: int = -1


@dataclass(frozen=True)
class Run:
    """Where one request sits in its core's schedule."""

    start: int
    length: int
    kind: str  # "hit", FULL_MISS or SHARED_WAIT


@dataclass
class CacheState:
    """Live cache state handed to policies. Policies must treat it as read-only."""

    capacity: int
    clock: int = 0
    tags: Dict[Page, int] = field(default_factory=dict)  # resident page -> last access
    loaded: Dict[Page, int] = field(default_factory=dict)  # resident page -> fetch completion
    reserved: Dict[Page, Tuple[int, int]] = field(default_factory=dict)  # page -> (end, core)
    hit_now: set = field(default_factory=set)
    cursors: List[int] = field(default_factory=list)
    inp: Optional[MulticoreInput] = None

    @property
    def resident(self):
        return self.tags.keys()

    @property
    def free_slots(self) -> int:
        return self.capacity - len(self.tags) - len(self.reserved)

    def candidates(self) -> List[Page]:
        """Resident pages a lazy policy may evict: those not hit in this timestep."""
        cand = [x for x in self.tags if x not in self.hit_now]
        return cand if cand else list(self.tags)

    def lru_choice(self) -> Optional[Page]:
        cand = self.candidates()
        if not cand:
            return None
        return min(cand, key=lambda x: (self.tags[x], x))

    def snapshot(self) -> dict:
        return {
            "t": self.clock,
            "resident": sorted((x, self.tags[x]) for x in self.tags),
            "reserved": sorted((x, end) for x, (end, _) in self.reserved.items()),
        }


@dataclass
class SimResult:
    inp: MulticoreInput
    params: SimParams
    policy_name: str
    schedule: List[List[Optional[Page]]]
    runs: List[List[Run]]
    per_core_finish: List[int]
    miss_events: List[MissEvent]
    hit_events: List[HitEvent]
    states: Optional[List[dict]] = None  # cache before each timestep, if recorded
    mode: str = "free"

    @property
    def events(self) -> list:
        return sorted(self.miss_events + self.hit_events, key=lambda e: e.seq)

    @property
    def horizon(self) -> int:
        return max(self.per_core_finish, default=0)

    def evictions_at(self, t: int) -> List[MissEvent]:
        return [e for e in self.miss_events if e.t == t and e.evicted]

    def start_times(self, core: int) -> List[int]:
        return [r.start for r in self.runs[core]]


def _check_input(inp: MulticoreInput, params: SimParams) -> None:
    if params.p is not None and params.p != inp.p:
        raise ValueError(f"params say p={params.p} but the input has {inp.p} cores")


def simulate_free(
    inp: MulticoreInput,
    policy,
    params: SimParams,
    *,
    record_states: bool = False,
    initial: Optional[Dict[Page, int]] = None,
) -> SimResult:
    """Run ``policy`` on ``inp`` in the free-interleaving model.

    ``initial`` optionally pre-loads resident pages with the given tags
    (tags <= 0), which lets two policies start from different caches.
    """
    _check_input(inp, params)
    k, tau, p = params.k, params.tau, inp.p
    seqs = inp.sequences
    state = CacheState(capacity=k, cursors=[0] * p, inp=inp)
    if initial:
        if len(initial) > k:
            raise ValueError("initial cache larger than k")
        for x, tag in initial.items():
            state.tags[x] = tag
            state.loaded[x] = tag
    policy.start(inp, params)

    schedule: List[List[Optional[Page]]] = [[] for _ in range(p)]
    runs: List[List[Run]] = [[] for _ in range(p)]
    busy_until = [0] * p
    current: List[Optional[Page]] = [None] * p
    pending_stall = [0] * p
    misses: List[MissEvent] = []
    hits: List[HitEvent] = []
    states: Optional[List[dict]] = [] if record_states else None
    seq_no = 0
    t = 0
    while any(state.cursors[c] < len(seqs[c]) or busy_until[c] > t for c in range(p)):
        t += 1
        state.clock = t
        state.hit_now = set()
        if states is not None:
            states.append(state.snapshot())
        for c in range(p):
            if busy_until[c] >= t:
                schedule[c].append(current[c])
                continue
            cur = state.cursors[c]
            if cur >= len(seqs[c]):
                continue
            page = seqs[c][cur]
            current[c] = page
            if page in state.tags:
                state.tags[page] = t
                state.hit_now.add(page)
                policy.observe("hit", t, c, page, state)
                hits.append(HitEvent(seq_no, t, c, page, cur))
                seq_no += 1
                runs[c].append(Run(t - pending_stall[c], 1 + pending_stall[c], "hit"))
                pending_stall[c] = 0
                busy_until[c] = t
                state.cursors[c] = cur + 1
                schedule[c].append(page)
            elif page in state.reserved:
                end = state.reserved[page][0]
                length = end - t + 1
                policy.observe("wait", t, c, page, state)
                misses.append(MissEvent(seq_no, t, c, page, SHARED_WAIT, length,
                                        free_before=state.free_slots, stall=pending_stall[c], index=cur))
                seq_no += 1
                runs[c].append(Run(t - pending_stall[c], length + pending_stall[c], SHARED_WAIT))
                pending_stall[c] = 0
                busy_until[c] = end
                state.cursors[c] = cur + 1
                schedule[c].append(page)
            else:
                free_before = state.free_slots
                lru = state.lru_choice()
                victims = list(policy.decide_eviction(state, c, page) or ())
                for v in victims:
                    if v not in state.tags:
                        raise PolicyContractError(
                            f"policy {policy.name} evicted non-resident page {v} "
                            f"at timestep {t} for core {c + 1}")
                if len(set(victims)) != len(victims):
                    raise PolicyContractError(f"duplicate victims at timestep {t}, core {c + 1}")
                if free_before + len(victims) < 1:
                    if state.tags:
                        raise PolicyContractError(
                            f"policy {policy.name} made no room at timestep {t} for core {c + 1}")
                    # every slot is reserved: the core stalls and retries (only when k < p)
                    pending_stall[c] += 1
                    busy_until[c] = t
                    schedule[c].append(page)
                    continue
                for v in victims:
                    del state.tags[v]
                    del state.loaded[v]
                    policy.observe("evict", t, c, v, state)
                end = t + tau - 1
                state.reserved[page] = (end, c)
                policy.observe("fetch", t, c, page, state)
                misses.append(MissEvent(seq_no, t, c, page, FULL_MISS, tau, tuple(victims),
                                        lru if victims else None, free_before, pending_stall[c], cur))
                seq_no += 1
                runs[c].append(Run(t - pending_stall[c], tau + pending_stall[c], FULL_MISS))
                pending_stall[c] = 0
                busy_until[c] = end
                state.cursors[c] = cur + 1
                schedule[c].append(page)
        done = [x for x, (end, _) in state.reserved.items() if end == t]
        for x in sorted(done):
            del state.reserved[x]
            state.tags[x] = policy.tag_for_fetch(x, t - tau + 1, t)
            state.loaded[x] = t
            policy.observe("load", t, -1, x, state)
    return SimResult(
        inp=inp,
        params=params,
        policy_name=policy.name,
        schedule=schedule,
        runs=runs,
        per_core_finish=[len(r) for r in schedule],
        miss_events=misses,
        hit_events=hits,
        states=states,
    )


def sequential_order(inp: MulticoreInput) -> List[Tuple[int, int]]:
    """All of R1, then all of R2, ... as a 1-based interleaving."""
    return [(c + 1, i + 1) for c, s in enumerate(inp.sequences) for i in range(len(s))]


def round_robin_order(inp: MulticoreInput) -> List[Tuple[int, int]]:
    order, i = [], 0
    while len(order) < inp.n:
        for c, s in enumerate(inp.sequences):
            if i < len(s):
                order.append((c + 1, i + 1))
        i += 1
    return order


def _check_order(inp: MulticoreInput, order: Sequence[Tuple[int, int]]) -> None:
    nxt = [1] * inp.p
    for c, i in order:
        if not 1 <= c <= inp.p:
            raise ValueError(f"interleaving names unknown core {c}")
        if i != nxt[c - 1]:
            raise ValueError(f"interleaving is not order-preserving for core {c} at index {i}")
        nxt[c - 1] += 1
    if [x - 1 for x in nxt] != list(inp.lengths):
        raise ValueError("interleaving does not cover the input exactly")


def simulate_explicit(
    inp: MulticoreInput,
    order: Sequence[Tuple[int, int]],
    policy,
    params: SimParams,
) -> SimResult:
    """Serve a fixed interleaving one request at a time, single-core style.

    A miss costs tau timesteps and a hit costs one. Each core's schedule is
    its projection onto the global timeline (None while another core is served).
    """
    _check_input(inp, params)
    _check_order(inp, order)
    k, tau, p = params.k, params.tau, inp.p
    state = CacheState(capacity=k, cursors=[0] * p, inp=inp)
    policy.start(inp, params)
    schedule: List[List[Optional[Page]]] = [[] for _ in range(p)]
    runs: List[List[Run]] = [[] for _ in range(p)]
    misses: List[MissEvent] = []
    hits: List[HitEvent] = []
    t = 0
    for seq_no, (c1, i1) in enumerate(order):
        c = c1 - 1
        page = inp.sequences[c][i1 - 1]
        start = t + 1
        state.clock = start
        state.hit_now = set()
        if page in state.tags:
            length, kind = 1, "hit"
            state.tags[page] = start
            policy.observe("hit", start, c, page, state)
            hits.append(HitEvent(seq_no, start, c, page, i1 - 1))
        else:
            length, kind = tau, FULL_MISS
            free_before = state.free_slots
            lru = state.lru_choice()
            victims = list(policy.decide_eviction(state, c, page) or ())
            for v in victims:
                if v not in state.tags:
                    raise PolicyContractError(
                        f"policy {policy.name} evicted non-resident page {v} at timestep {start}")
            if free_before + len(victims) < 1:
                raise PolicyContractError(f"policy {policy.name} made no room at timestep {start}")
            for v in victims:
                del state.tags[v]
                del state.loaded[v]
                policy.observe("evict", start, c, v, state)
            policy.observe("fetch", start, c, page, state)
            end = start + tau - 1
            state.tags[page] = policy.tag_for_fetch(page, start, end)
            state.loaded[page] = end
            policy.observe("load", end, -1, page, state)
            misses.append(MissEvent(seq_no, start, c, page, FULL_MISS, tau, tuple(victims),
                                    lru if victims else None, free_before, 0, i1 - 1))
        state.cursors[c] = i1
        row = schedule[c]
        row.extend([None] * (t - len(row)))
        row.extend([page] * length)
        runs[c].append(Run(start, length, kind))
        t += length
    return SimResult(
        inp=inp,
        params=params,
        policy_name=policy.name,
        schedule=schedule,
        runs=runs,
        per_core_finish=[len(r) for r in schedule],
        miss_events=misses,
        hit_events=hits,
        mode="explicit",
    )


def _check_split(result: SimResult, j: int) -> None:
    if not 1 <= j < result.horizon:
        raise ValueError(f"split point j={j} outside [1, {result.horizon - 1}]")


def schedule_split(result: SimResult, j: int):
    """Cut the schedule into timesteps 1..j, timestep j+1, and j+2 onwards."""
    _check_split(result, j)
    prefix = [row[:j] for row in result.schedule]
    at = tuple(row[j] if len(row) > j else None for row in result.schedule)
    suffix = [row[j + 1:] for row in result.schedule]
    return prefix, at, suffix


def request_split(result: SimResult, inp: MulticoreInput, j: int):
    """Split the input by when each request's service begins.

    prefix: began at or before j; r_at: begins exactly at j+1; suffix: the rest.
    prefix + r_at + suffix is the input on every core.
    """
    _check_split(result, j)
    pre, at, suf = [], [], []
    for c, seq in enumerate(inp.sequences):
        starts = result.start_times(c)
        a = sum(1 for s in starts if s <= j)
        b = a + sum(1 for s in starts if s == j + 1)
        pre.append(seq[:a])
        at.append(seq[a:b])
        suf.append(seq[b:])
    return MulticoreInput(pre), MulticoreInput(at), MulticoreInput(suf)
