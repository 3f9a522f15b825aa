"""Lower-bound input families and finite-size ratio curves."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from .engine import FULL_MISS, SimResult, sequential_order, simulate_explicit, simulate_free
from .measures import CostMeasure, cost
from .model import MulticoreInput, SimParams
from .policies import FIF, LRU, EvictionPolicy


def gen_lru_hass(k: int, p: int, ell: int) -> MulticoreInput:
    """Each core cycles through k/p + 1 private pages, ell times.

    Core i (0-based) owns pages i*(k/p+1) .. i*(k/p+1) + k/p.
    """
    if p < 1 or k < 1 or k % p:
        raise ValueError(f"p={p} must divide k={k}")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    m = k // p + 1
    return MulticoreInput([[i * m + x for x in range(m)] * ell for i in range(p)])


# ----------------------------------------------------------- red/blue adversary

@dataclass
class LowerSharedInput:
    inp: MulticoreInput
    blue: List[int]
    red: List[int]
    phases: List[dict]  # per core and phase: kind, round, start/end index
    q: Dict[str, List[int]]  # q counters per core (key "1"/"2")
    padding: List[dict]
    replay: SimResult
    hard_all_miss: bool
    aligned: bool
    colour_invariant: bool

    def summary(self) -> dict:
        return {
            "input": self.inp.to_lists(),
            "blue": self.blue,
            "red": self.red,
            "phases": self.phases,
            "q": self.q,
            "padding": self.padding,
            "hard_all_miss": self.hard_all_miss,
            "aligned": self.aligned,
            "colour_invariant": self.colour_invariant,
        }


class _Growing:
    """Lets the engine read a sequence that the generator extends on demand."""

    def __init__(self, ask: Callable[[int], int], core: int):
        self.items: List[int] = []
        self.ask = ask
        self.core = core
        self.limit = 0

    def __len__(self) -> int:
        return self.limit

    def __getitem__(self, idx: int) -> int:
        while len(self.items) <= idx:
            self.items.append(self.ask(self.core))
        return self.items[idx]


def _q_counter(requests: Sequence[int], k: int) -> int:
    """Requests until the (k-1)-th distinct page shows up in a hard phase."""
    seen = set()
    for n, x in enumerate(requests, start=1):
        seen.add(x)
        if len(seen) == k - 1:
            return n
    return len(requests)


def _alternation(first: int, second: int, q: int, ell: int) -> List[int]:
    """q requests alternating first/second, then first until length ell."""
    q = min(q, ell)
    return [first if i % 2 == 0 else second for i in range(q)] + [first] * (ell - q)


def gen_lower_shared(k: int, tau: int, ell: int, phi: int,
                     target: Optional[Callable[[], EvictionPolicy]] = None) -> LowerSharedInput:
    """Two-core red/blue construction built against ``target`` (default LRU).

    Pages 0..k-1 are blue, k..2k-1 are red. Round 1 is an easy phase of
    (b1 b2)^(ell/2) on core 1 and (r1 r2)^(ell/2) on core 2, then a hard
    phase of ell requests per core. Each hard-phase request is chosen when
    the engine reaches it: core 1 asks for the lowest-id red page that is
    neither cached nor in flight, core 2 does the same with blue. Each of the
    ``phi`` further rounds opens with an easy phase over one blue and one red
    page cached at that moment, alternated for q requests (q taken from the
    most recent opposing hard phase) and then repeating one page.
    """
    if k % 2 or k < 2:
        raise ValueError("k must be even")
    if ell < k or ell % 2:
        raise ValueError("ell must be even and at least k")
    if phi < 0:
        raise ValueError("phi must be >= 0")
    target = target or LRU
    blue = list(range(k))
    red = list(range(k, 2 * k))
    params = SimParams(k, tau, 2)

    # Phase plan per core: list of ("easy", requests) / ("hard", count).
    plans: List[List[dict]] = [[], []]
    plans[0].append({"kind": "easy", "round": 1, "requests": [blue[0], blue[1]] * (ell // 2)})
    plans[1].append({"kind": "easy", "round": 1, "requests": [red[0], red[1]] * (ell // 2)})
    for c in range(2):
        plans[c].append({"kind": "hard", "round": 1, "count": ell})

    state_box: Dict[str, object] = {}
    hard_log: List[List[List[int]]] = [[], []]
    padding: List[dict] = []
    q_counters: Dict[str, List[int]] = {"1": [], "2": []}

    def absent(colour: List[int]) -> int:
        st = state_box["state"]
        for x in colour:
            if x not in st.tags and x not in st.reserved:
                return x
        raise RuntimeError(f"no absent page of the needed colour; cache {st.snapshot()}")

    # The sequences are generated lazily: position -> (phase index, offset).
    layout: List[List[tuple]] = [[], []]

    def extend_layout(c: int) -> None:
        for ph_idx, ph in enumerate(plans[c]):
            if ph.get("laid"):
                continue
            n = len(ph["requests"]) if ph["kind"] == "easy" else ph["count"]
            ph["start"] = len(layout[c])
            layout[c].extend((ph_idx, o) for o in range(n))
            ph["end"] = len(layout[c])
            ph["laid"] = True

    def ask(c: int) -> int:
        pos = len(seqs[c].items)
        ph_idx, off = layout[c][pos]
        ph = plans[c][ph_idx]
        if ph["kind"] == "easy":
            return ph["requests"][off]
        if off == 0:
            hard_log[c].append([])
        x = absent(red if c == 0 else blue)
        hard_log[c][-1].append(x)
        return x

    seqs = [_Growing(ask, 0), _Growing(ask, 1)]

    def plan_round(r: int) -> None:
        st = state_box["state"]
        try:
            b_star = min(x for x in blue if x in st.tags)
            r_star = min(x for x in red if x in st.tags)
        except ValueError:
            raise RuntimeError(f"round {r}: cache lacks a page of each colour; {st.snapshot()}") from None
        # core 1 partners with core 2's last hard phase and vice versa
        q1 = _q_counter(hard_log[1][-1], k)
        q2 = _q_counter(hard_log[0][-1], k)
        q_counters["1"].append(q1)
        q_counters["2"].append(q2)
        for c, (first, second, q) in enumerate(((b_star, r_star, q1), (r_star, b_star, q2))):
            reqs = _alternation(first, second, q, ell)
            if q % 2:
                padding.append({"core": c + 1, "round": r, "q": q, "note": "odd q: alternation ends on its first page"})
            plans[c].append({"kind": "easy", "round": r, "requests": reqs})
            plans[c].append({"kind": "hard", "round": r, "count": ell})

    driver = _RoundDriver(target(), state_box)
    view = _LazyInput(seqs)
    rounds_done = 1
    while True:
        for c in range(2):
            extend_layout(c)
            seqs[c].limit = len(layout[c])
        state_box.pop("state", None)
        result = simulate_free(view, driver, params)  # type: ignore[arg-type]
        if rounds_done > phi:
            break
        rounds_done += 1
        plan_round(rounds_done)
    final = MulticoreInput([s.items[: s.limit] for s in seqs])
    replay = simulate_free(final, target(), params, record_states=True)
    if replay.schedule != result.schedule:
        raise RuntimeError("replay of the generated input differs from the adaptive run")

    phases = []
    for c in range(2):
        for ph in plans[c]:
            phases.append({"core": c + 1, "round": ph["round"], "kind": ph["kind"],
                           "start": ph["start"], "end": ph["end"]})
    hard_spans = {}
    for ph in phases:
        runs = replay.runs[ph["core"] - 1]
        last = runs[ph["end"] - 1]
        ph["t_start"] = runs[ph["start"]].start
        ph["t_end"] = last.start + last.length - 1
        if ph["kind"] == "hard":
            hard_spans.setdefault(ph["round"], []).append((ph["t_start"], ph["t_end"]))
    hard_all_miss = all(replay.runs[ph["core"] - 1][i].kind == FULL_MISS
                        for ph in phases if ph["kind"] == "hard"
                        for i in range(ph["start"], ph["end"]))
    aligned = all(len(set(sp)) == 1 for sp in hard_spans.values())
    colour_ok = _colour_invariant(replay, [sp for v in hard_spans.values() for sp in v], blue, red)
    return LowerSharedInput(final, blue, red, phases, q_counters, padding, replay,
                            hard_all_miss, aligned, colour_ok)


def _colour_invariant(replay: SimResult, windows, blue, red) -> bool:
    """At every hard-phase timestep the cache holds (or is fetching) a red and a blue page."""
    bset, rset = set(blue), set(red)
    for st in replay.states or ():
        t = st["t"]
        if not any(a <= t <= b for a, b in windows):
            continue
        present = {x for x, _ in st["resident"]} | {x for x, _ in st["reserved"]}
        if not (present & bset and present & rset):
            return False
    return True


class _RoundDriver(EvictionPolicy):
    """Delegates to the target and exposes the engine's live cache state to the generator."""

    def __init__(self, inner: EvictionPolicy, box: dict):
        self.inner = inner
        self.box = box
        self.name = inner.name

    def start(self, inp, params):
        self.inner.start(inp, params)

    def observe(self, kind, t, core, page, state):
        self.box["state"] = state
        self.inner.observe(kind, t, core, page, state)

    def victim_order(self, state, core, page):
        return self.inner.victim_order(state, core, page)

    def decide_eviction(self, state, core, page):
        return self.inner.decide_eviction(state, core, page)

    def tag_for_fetch(self, page, t_start, t_end):
        return self.inner.tag_for_fetch(page, t_start, t_end)


class _LazyInput:
    """Just enough of MulticoreInput for the engine to read growing sequences."""

    def __init__(self, seqs):
        self.sequences = seqs
        self.p = len(seqs)


# ----------------------------------------------------------- ratio curves

@dataclass
class RatioRow:
    size: int
    n: int
    cost_online: int
    cost_baseline: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.cost_online, self.cost_baseline)

    def to_dict(self) -> dict:
        return {"size": self.size, "n": self.n, "cost_online": self.cost_online,
                "cost_baseline": self.cost_baseline, "ratio": float(self.ratio),
                "ratio_exact": f"{self.ratio.numerator}/{self.ratio.denominator}"}


@dataclass
class RatioCurve:
    rows: List[RatioRow]
    measure: str
    strictly_increasing: bool
    non_decreasing: bool

    def to_dict(self) -> dict:
        return {"measure": self.measure, "rows": [r.to_dict() for r in self.rows],
                "strictly_increasing": self.strictly_increasing,
                "non_decreasing": self.non_decreasing}


def sequential_fif(inp: MulticoreInput, params: SimParams) -> SimResult:
    """Offline baseline: serve all of core 1, then core 2, ... with furthest-in-future."""
    return simulate_explicit(inp, sequential_order(inp), FIF(inp), params)


def ratio_curve(generator: Callable[[int], MulticoreInput],
                online: Callable[[], EvictionPolicy],
                baseline: Callable[[MulticoreInput, SimParams], SimResult],
                sizes: Iterable[int], params: SimParams,
                measure=CostMeasure.TOTAL_TIME) -> RatioCurve:
    """Online cost over baseline cost for each generated size, plus trend verdicts."""
    m = CostMeasure.parse(measure)
    rows = []
    for s in sizes:
        inp = generator(s)
        on = cost(simulate_free(inp, online(), params), m)
        off = cost(baseline(inp, params), m)
        rows.append(RatioRow(s, inp.n, on, off))
    ratios = [r.ratio for r in rows]
    inc = all(a < b for a, b in zip(ratios, ratios[1:]))
    nondec = all(a <= b for a, b in zip(ratios, ratios[1:]))
    return RatioCurve(rows, m.value, inc, nondec)
