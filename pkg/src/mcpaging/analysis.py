"""Comparing algorithms over enumerated input universes.

Contents, roughly in dependency order:

* canonical enumeration of small universes (optionally locality-filtered);
* cost tables under two policies and the dominance rules behind bijective
  and cyclic comparisons;
* unzipping of m-to-1 mappings into injective ones;
* the explicit input mappings used in the lazy-vs-FWF and LRU separation
  arguments (two-core continuations, inverse inputs, the four-case map).
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .engine import FULL_MISS, SimResult, request_split, simulate_free
from .locality import ConcaveFunction, complement_input, is_consistent
from .measures import BudgetError, CostMeasure, cost
from .model import MulticoreInput, Page, SimParams
from .policies import LRU, EvictionPolicy, Switch, derive_lru_like_variant, make_policy

PolicyLike = Union[str, Callable[[], EvictionPolicy]]


# ------------------------------------------------------------ enumeration

def _length_vectors(p: int, per_core: Optional[Sequence[int]], max_total: Optional[int]):
    caps = list(per_core) if per_core is not None else [max_total] * p
    vecs = [v for v in itertools.product(*(range(c + 1) for c in caps))
            if max_total is None or sum(v) <= max_total]
    vecs.sort(key=lambda v: (sum(v), v))
    return vecs


def _inputs_for(universe: int, vec: Sequence[int]) -> Iterator[MulticoreInput]:
    pages = range(universe)
    for flat in itertools.product(pages, repeat=sum(vec)):
        seqs, pos = [], 0
        for n in vec:
            seqs.append(flat[pos:pos + n])
            pos += n
        yield MulticoreInput(seqs)


def enumerate_total(universe: int, p: int, total: int, include_empty: bool = False) -> Iterator[MulticoreInput]:
    """Every input with at most ``total`` requests overall, in canonical order."""
    for vec in _length_vectors(p, None, total):
        if sum(vec) == 0 and not include_empty:
            continue
        yield from _inputs_for(universe, vec)


@dataclass
class UniverseScan:
    universe: int
    p: int
    per_core_max: Optional[Tuple[int, ...]]
    max_total: Optional[int]
    f: Optional[ConcaveFunction]
    inputs: List[MulticoreInput]
    include_empty: bool = False

    def __len__(self) -> int:
        return len(self.inputs)

    def __iter__(self):
        return iter(self.inputs)

    def closure_ceiling(self, measure) -> Optional[int]:
        """Largest cost c such that every input of cost <= c is in this scan."""
        m = CostMeasure.parse(measure)
        if m is CostMeasure.MISS_COUNT:
            return None
        bounds = []
        if self.per_core_max is not None:
            # an outside input has some core longer than its cap
            bounds.append(min(self.per_core_max))
        if self.max_total is not None:
            if m is CostMeasure.TOTAL_TIME:
                bounds.append(self.max_total)
            else:
                bounds.append(math.ceil((self.max_total + 1) / self.p) - 1)
        # a locality filter only removes inputs that are outside the restricted universe anyway
        return min(bounds)

    def describe(self) -> dict:
        return {
            "universe": self.universe,
            "p": self.p,
            "per_core_max": list(self.per_core_max) if self.per_core_max else None,
            "max_total": self.max_total,
            "f": self.f.to_dict() if self.f else None,
            "size": len(self.inputs),
        }


def enumerate_universe(
    universe: int,
    p: int,
    length_bounds: Union[int, Sequence[int], None] = None,
    f: Optional[ConcaveFunction] = None,
    *,
    max_total: Optional[int] = None,
    include_empty: bool = False,
    budget: int = 3_000_000,
) -> UniverseScan:
    """All inputs within per-core and/or total length bounds, canonically ordered.

    Canonical order: total length, then the length vector, then the pages
    lexicographically. With ``f`` the scan keeps only f-consistent inputs.
    """
    if length_bounds is None and max_total is None:
        raise ValueError("give per-core bounds, a total bound, or both")
    per_core = None
    if length_bounds is not None:
        per_core = (length_bounds,) * p if isinstance(length_bounds, int) else tuple(length_bounds)
        if len(per_core) != p:
            raise ValueError("one length bound per core")
    vecs = _length_vectors(p, per_core, max_total)
    size = sum(universe ** sum(v) for v in vecs)
    if size > budget:
        raise BudgetError(f"scan has {size} inputs, budget is {budget}")
    out = []
    for vec in vecs:
        if sum(vec) == 0 and not include_empty:
            continue
        for inp in _inputs_for(universe, vec):
            if f is None or is_consistent(inp, f):
                out.append(inp)
    return UniverseScan(universe, p, per_core, max_total, f, out, include_empty)


# ------------------------------------------------------------ cost tables

def policy_factory(policy: PolicyLike):
    if isinstance(policy, str):
        return lambda inp: make_policy(policy, inp)
    return lambda inp: policy()


def _policy_label(policy: PolicyLike) -> str:
    if isinstance(policy, str):
        return policy
    return policy().name


def _costs_chunk(args):
    spec, inputs, measure, params = args
    fac = policy_factory(spec)
    return [cost(simulate_free(inp, fac(inp), params), measure) for inp in inputs]


def costs_for(policy: PolicyLike, inputs: Sequence[MulticoreInput], measure, params: SimParams,
              jobs: int = 1) -> np.ndarray:
    """Cost of every input under ``policy``; order follows ``inputs`` for any ``jobs``."""
    inputs = list(inputs)
    if jobs > 1 and isinstance(policy, str) and len(inputs) > 200:
        size = math.ceil(len(inputs) / (jobs * 4))
        chunks = [inputs[i:i + size] for i in range(0, len(inputs), size)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = ex.map(_costs_chunk, [(policy, ch, measure, params) for ch in chunks])
            flat = [v for part in parts for v in part]
        return np.array(flat, dtype=np.int64)
    return np.array(_costs_chunk((policy, inputs, measure, params)), dtype=np.int64)


@dataclass
class CostTable:
    inputs: List[MulticoreInput]
    a: np.ndarray
    b: np.ndarray
    name_a: str
    name_b: str
    measure: str
    scan: Optional[UniverseScan] = None

    def partitions(self) -> Dict[Tuple[int, ...], np.ndarray]:
        groups: Dict[Tuple[int, ...], List[int]] = defaultdict(list)
        for idx, inp in enumerate(self.inputs):
            groups[inp.lengths].append(idx)
        return {key: np.array(v, dtype=np.int64) for key, v in groups.items()}

    def rows(self) -> Iterator[dict]:
        for idx, inp in enumerate(self.inputs):
            yield {"id": idx, "lengths": list(inp.lengths), "input": inp.to_lists(),
                   self.name_a: int(self.a[idx]), self.name_b: int(self.b[idx])}


def cost_table(policy_a: PolicyLike, policy_b: PolicyLike, scan: UniverseScan, measure,
               params: SimParams, jobs: int = 1) -> CostTable:
    m = CostMeasure.parse(measure)
    inputs = list(scan)
    return CostTable(inputs, costs_for(policy_a, inputs, m, params, jobs),
                     costs_for(policy_b, inputs, m, params, jobs),
                     _policy_label(policy_a), _policy_label(policy_b), m.value, scan)


# ------------------------------------------------------------ relations

def dominance_check(costs_a: Sequence[float], costs_b: Sequence[float]) -> bool:
    """Sorted pointwise a_i <= b_i, i.e. a cost-respecting bijection exists."""
    if len(costs_a) != len(costs_b):
        raise ValueError("dominance needs equally many costs on both sides")
    a = np.sort(np.asarray(costs_a))
    b = np.sort(np.asarray(costs_b))
    return bool(np.all(a <= b))


def cumulative_dominance(costs_a, costs_b, ceiling: float) -> Tuple[bool, Optional[float]]:
    """For every threshold x <= ceiling, #{a <= x} >= #{b <= x}.

    Returns (holds, a threshold where the inequality is strict, if any).
    """
    a = np.sort(np.asarray(costs_a))
    b = np.sort(np.asarray(costs_b))
    xs = np.unique(np.concatenate([a, b]))
    xs = xs[xs <= ceiling]
    ca = np.searchsorted(a, xs, side="right")
    cb = np.searchsorted(b, xs, side="right")
    holds = bool(np.all(ca >= cb))
    strict = xs[ca > cb]
    return holds, (strict[0].item() if strict.size else None)


@dataclass
class RelationReport:
    kind: str  # "bijective" or "cyclic"
    name_a: str
    name_b: str
    a_le_b: bool
    b_le_a: bool
    horizon: Optional[float]
    witness: Optional[dict] = None
    violation: Optional[dict] = None
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if self.a_le_b and self.b_le_a:
            return "equivalent"
        if self.a_le_b:
            return "A<=B"
        if self.b_le_a:
            return "B<=A"
        return "incomparable-at-horizon"

    @property
    def strict(self) -> bool:
        return self.verdict in ("A<=B", "B<=A")

    def summary(self) -> str:
        v = self.verdict
        if v == "A<=B":
            return f"{self.name_a} <= {self.name_b} (strict)"
        if v == "B<=A":
            return f"{self.name_b} <= {self.name_a} (strict)"
        return v

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "A": self.name_a,
            "B": self.name_b,
            "verdict": self.verdict,
            "summary": self.summary(),
            "horizon": self.horizon,
            "witness": self.witness,
            "violation": self.violation,
            "details": self.details,
        }


def bijective_from_partitions(parts: Dict[Hashable, Tuple[Sequence, Sequence]],
                              name_a: str = "A", name_b: str = "B") -> RelationReport:
    """Dominance inside every partition, in both directions."""
    a_le_b = b_le_a = True
    witness = violation = None
    mismatched = 0
    for key in sorted(parts, key=str):
        ca, cb = parts[key]
        ab, ba = dominance_check(ca, cb), dominance_check(cb, ca)
        if sorted(ca) != sorted(cb):
            mismatched += 1
            if witness is None:
                witness = {"partition": str(key), "A": sorted(ca), "B": sorted(cb)}
        if not ab and a_le_b:
            violation = violation or {"partition": str(key), "direction": "A<=B"}
        a_le_b &= ab
        b_le_a &= ba
    return RelationReport("bijective", name_a, name_b, a_le_b, b_le_a, None, witness, violation,
                          {"partitions": len(parts), "partitions_with_different_multisets": mismatched})


def bijective_relation(table: CostTable) -> RelationReport:
    parts = {key: (table.a[idx].tolist(), table.b[idx].tolist())
             for key, idx in table.partitions().items()}
    rep = bijective_from_partitions(parts, table.name_a, table.name_b)
    rep.details["measure"] = table.measure
    if table.scan is not None:
        rep.details["scan"] = table.scan.describe()
    return rep


def cyclic_from_costs(costs_a, costs_b, ceiling: float, name_a: str = "A", name_b: str = "B",
                      labels: Optional[Sequence] = None) -> RelationReport:
    """Cumulative-count dominance at ``ceiling`` in both directions."""
    ab, x_ab = cumulative_dominance(costs_a, costs_b, ceiling)
    ba, x_ba = cumulative_dominance(costs_b, costs_a, ceiling)
    rep = RelationReport("cyclic", name_a, name_b, ab, ba, ceiling)
    x = x_ab if ab and not ba else x_ba if ba and not ab else None
    if x is not None:
        low, high = (costs_a, costs_b) if ab else (costs_b, costs_a)
        example = None
        for idx, (u, v) in enumerate(zip(low, high)):
            if u <= x < v:
                example = labels[idx] if labels is not None else idx
                break
        rep.witness = {"threshold": x, "input": example}
    if not ab:
        # first threshold where A has fewer cheap inputs than B
        _, bad = cumulative_dominance(costs_b, costs_a, ceiling)
        rep.violation = {"threshold": bad, "direction": "A<=B"}
    return rep


def cyclic_relation(table: CostTable, ceiling: Optional[float] = None) -> RelationReport:
    if table.scan is None:
        raise ValueError("cyclic comparison needs the scan to check the closure rule")
    allowed = table.scan.closure_ceiling(table.measure)
    if allowed is None:
        raise ValueError(f"measure {table.measure} has no closed horizon")
    if ceiling is None:
        ceiling = allowed
    if ceiling > allowed:
        raise ValueError(f"ceiling {ceiling} breaks the closure rule: scan only covers costs <= {allowed}")
    labels = [inp.to_lists() for inp in table.inputs]
    rep = cyclic_from_costs(table.a.tolist(), table.b.tolist(), ceiling, table.name_a, table.name_b, labels)
    rep.details = {"measure": table.measure, "scan": table.scan.describe(), "closure_ceiling": allowed}
    return rep


def check_mapping(mapping: Dict[Hashable, Hashable], costs_a: Dict, costs_b: Dict) -> dict:
    """Check an explicit mapping x -> y against A(x) <= B(y)."""
    bad = [x for x, y in mapping.items() if costs_a[x] > costs_b[y]]
    images = Counter(mapping.values())
    return {
        "pairs": len(mapping),
        "violations": bad,
        "injective": all(v == 1 for v in images.values()),
        "surjective": set(images) == set(costs_b),
    }


# ------------------------------------------------------------ unzipping

@dataclass
class UnzipResult:
    pairs: Dict[Hashable, Hashable]
    deferred: List[Hashable]
    classes: Dict[int, int]  # multiplicity -> number of image elements
    violations: List[Hashable]

    @property
    def injective(self) -> bool:
        vals = list(self.pairs.values())
        return len(vals) == len(set(vals))


def unzip(mapping: Dict[Hashable, Hashable], costs_a: Dict, costs_b: Dict,
          extra_images: Optional[Dict[int, Sequence[Hashable]]] = None) -> UnzipResult:
    """Turn an m-to-1 mapping into an injective one, class by class.

    Within the class of images with m pre-images, images are sorted by
    B-cost (ties by first appearance) as y_1, y_2, ... and the j-th pre-image
    of y_i moves to y_{m(i-1)+j}. ``extra_images[m]`` lists further members of
    that class that lie in the finite window but had no pre-image listed.
    Pre-images whose new target falls past the window are deferred.
    """
    pre: Dict[Hashable, List[Hashable]] = defaultdict(list)
    for x, y in mapping.items():
        pre[y].append(x)
    by_class: Dict[int, List[Hashable]] = defaultdict(list)
    for y, xs in pre.items():
        by_class[len(xs)].append(y)
    for m, ys in (extra_images or {}).items():
        for y in ys:
            if y in pre:
                raise ValueError(f"extra image {y!r} already has pre-images")
            by_class[m].append(y)
    out: Dict[Hashable, Hashable] = {}
    deferred: List[Hashable] = []
    order = {y: i for i, y in enumerate(itertools.chain.from_iterable(by_class.values()))}
    for m, ys in sorted(by_class.items()):
        ys_sorted = sorted(ys, key=lambda y: (costs_b[y], order[y]))
        for i, y in enumerate(ys_sorted, start=1):
            for jdx, x in enumerate(pre.get(y, []), start=1):
                target = m * (i - 1) + jdx
                if target <= len(ys_sorted):
                    out[x] = ys_sorted[target - 1]
                else:
                    deferred.append(x)
    violations = [x for x, y in out.items() if costs_a[x] > costs_b[y]]
    return UnzipResult(out, deferred, {m: len(ys) for m, ys in by_class.items()}, violations)


# ------------------------------------------------------------ two-core continuations

def nice_bijection_map(continuation, case: int, x: Page, q_or_a: Page, tau: int):
    """The two-cycle used to compare caches differing in one page.

    case 1: (q.s, x.s') <-> (x^tau.s, q.s')
    case 2: (a.s, x.s') <-> (x.s, a^tau.s')
    Either form is accepted; the other one is returned.
    """
    s1, s2 = list(continuation[0]), list(continuation[1])
    y = q_or_a
    if case == 1:
        if s1[:1] == [y] and s2[:1] == [x]:
            return [x] * tau + s1[1:], [y] + s2[1:]
        if s1[:tau] == [x] * tau and s2[:1] == [y]:
            return [y] + s1[tau:], [x] + s2[1:]
    elif case == 2:
        if s1[:1] == [y] and s2[:1] == [x]:
            return [x] + s1[1:], [y] * tau + s2[1:]
        if s1[:1] == [x] and s2[:tau] == [y] * tau:
            return [y] + s1[1:], [x] + s2[tau:]
    else:
        raise ValueError("case must be 1 or 2")
    raise ValueError("continuation does not have the shape this case maps")


# ------------------------------------------------------------ inverse inputs

class InverseUndefined(ValueError):
    pass


def inverse_input(sigma: Page, result_b: SimResult, inp: MulticoreInput, t: int) -> MulticoreInput:
    """Shorten repetition runs of ``sigma`` so a missing policy replays B's schedule.

    The lowest-index core starting a request to sigma at t is the initiator;
    its run must be at least tau long and keeps run - tau + 1 requests. Any
    other core starting a sigma run at t + tau - b (0 < b <= tau) keeps
    run - b + 1 requests; its run must be at least b long.
    """
    tau = result_b.params.tau
    cuts: Dict[int, Tuple[int, int]] = {}  # core -> (start index, requests to drop)
    initiator = None
    for c, runs in enumerate(result_b.runs):
        seq = inp.sequences[c]
        for idx, r in enumerate(runs):
            if seq[idx] != sigma or not t <= r.start <= t + tau - 1:
                continue
            if idx > 0 and seq[idx - 1] == sigma:
                continue  # not the start of a run
            b = t + tau - r.start
            length = 0
            while idx + length < len(seq) and seq[idx + length] == sigma:
                length += 1
            # the run must be served back to back by B
            for off in range(length):
                rr = runs[idx + off]
                if rr.kind != "hit" or rr.start != r.start + off:
                    length = off
                    break
            if r.start == t and initiator is None:
                initiator = c
            if length < b:
                raise InverseUndefined(f"core {c + 1}: {length} repetitions of page {sigma}, need {b}")
            cuts[c] = (idx, b - 1)
            break
    if initiator is None:
        raise InverseUndefined(f"no core starts a request to page {sigma} at timestep {t}")
    seqs = []
    for c, seq in enumerate(inp.sequences):
        if c in cuts:
            idx, drop = cuts[c]
            seqs.append(seq[:idx] + seq[idx + drop:])
        else:
            seqs.append(seq)
    return MulticoreInput(seqs)


# ------------------------------------------------------------ the four-case map

def lru_after(base_factory: Callable[[], EvictionPolicy], j: int) -> EvictionPolicy:
    """``base`` through timestep j+1, tag-based LRU afterwards."""
    return Switch(base_factory(), LRU(), j + 1, name=f"{base_factory().name}->lru@{j + 1}")


@dataclass
class LruStepsChain:
    costs: List[int]  # cost of each stage, stage 0 being the base policy
    lru_cost: int
    reaches_lru: bool  # the last stage's schedule equals LRU's

    def to_dict(self) -> dict:
        return {"costs": self.costs, "lru_cost": self.lru_cost, "reaches_lru": self.reaches_lru}


def lru_steps_chain(base_factory: Callable[[], EvictionPolicy], inp: MulticoreInput,
                    params: SimParams, measure=CostMeasure.TOTAL_TIME) -> LruStepsChain:
    """Apply the one-step LRU-like derivation at j = 0, 1, ... on a single input.

    Stage s wraps stage s-1 with ``derive_lru_like_variant(., s-1)``, so it
    agrees with the previous stage through timestep s-1 and evicts the
    minimum-tag page at timestep s. The chain stops once a stage reaches the
    run's horizon. Only the replayed horizon of this input is exercised; no
    claim is made about the intermediate stages as online policies elsewhere.
    """
    m = CostMeasure.parse(measure)
    lru_res = simulate_free(inp, LRU(), params)
    stages = [cost(simulate_free(inp, base_factory(), params), m)]
    policy_builders = [base_factory]
    res = None
    for j in range(0, lru_res.horizon + 1):
        prev = policy_builders[-1]
        policy_builders.append(lambda prev=prev, j=j: derive_lru_like_variant(prev(), j))
        res = simulate_free(inp, policy_builders[-1](), params)
        stages.append(cost(res, m))
        if j + 1 >= res.horizon:
            break
    reaches = res is not None and res.schedule == lru_res.schedule
    return LruStepsChain(stages, cost(lru_res, m), reaches)


@dataclass
class PiPair:
    source: MulticoreInput
    case: int  # 0 identity, 1-4 as in the construction
    image: Optional[MulticoreInput]
    pairs: List[Tuple[Page, Page]]
    cost_b: int
    cost_a_image: Optional[int] = None
    check: Optional[bool] = None  # the case's own claim (equality / schedule match)
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "source": self.source.to_lists(),
            "case": self.case,
            "image": self.image.to_lists() if self.image is not None else None,
            "pairs": [list(p) for p in self.pairs],
            "cost_b": self.cost_b,
            "cost_a_image": self.cost_a_image,
            "check": self.check,
            "note": self.note,
        }


def _complement_all(inp: MulticoreInput, pairs) -> MulticoreInput:
    for lru, nlru in pairs:
        inp = complement_input(inp, lru, nlru)
    return inp


def _merge(x: MulticoreInput, y: MulticoreInput) -> MulticoreInput:
    return x.concat(y)


def pi_map(R: MulticoreInput, j: int, f: ConcaveFunction, params: SimParams,
           base_factory: Callable[[], EvictionPolicy], measure=CostMeasure.TOTAL_TIME,
           res_a: Optional[SimResult] = None) -> PiPair:
    """Apply one step of the four-case map to R.

    A is ``base`` through j+1 and LRU afterwards; B is the LRU-like variant of
    ``base`` at j. Case 4 images are left as None here; the scan-level driver
    assigns them. Cases 1-3 carry a ``check`` of their own claim.
    """
    m = CostMeasure.parse(measure)
    if res_a is None:
        res_a = simulate_free(R, lru_after(base_factory, j), params)
    b_policy = derive_lru_like_variant(base_factory(), j)
    res_b = simulate_free(R, b_policy, params)
    cost_b = cost(res_b, m)
    pairs = list(b_policy.pairs)
    if j >= res_a.horizon or not pairs:
        return PiPair(R, 0, R, [], cost_b, cost(res_a, m), cost(res_a, m) == cost_b)
    rp, r_at, rs = request_split(res_a, R, j)
    note = "multi-pair" if len(pairs) > 1 else ""

    # Cores are served in index order inside a timestep, so requests that
    # start at j+1 on cores after the deciding one already see the swapped
    # caches; they are complemented together with the suffix.
    first_core = b_policy.pair_cores[0]
    at_before = MulticoreInput([s if c <= first_core else () for c, s in enumerate(r_at.sequences)])
    at_after = MulticoreInput([() if c <= first_core else s for c, s in enumerate(r_at.sequences)])
    rest = at_after.concat(rs)
    cand = rp.concat(_merge(at_before, _complement_all(rest, pairs)))
    if is_consistent(cand, f):
        ca = cost(simulate_free(cand, lru_after(base_factory, j), params), m)
        return PiPair(R, 1, cand, pairs, cost_b, ca, ca == cost_b, note)

    lru_pg, nlru_pg = pairs[0]
    # everything B serves after its first swapped decision, in event order
    decision = next(e for e in res_b.miss_events if e.t == j + 1 and e.core == first_core)
    later = [e for e in res_b.events if e.seq > decision.seq]
    first_sigma = next((e for e in later if e.page == nlru_pg), None)
    limit = first_sigma.seq if first_sigma is not None else math.inf
    early = [e for e in later if e.seq < limit and getattr(e, "kind", None) == FULL_MISS and e.evicted]
    if early or first_sigma is None:
        ca = cost(res_a, m)
        why = "eviction before first NLRU request" if early else "no NLRU request after the swap"
        return PiPair(R, 2, R, pairs, cost_b, ca, ca == cost_b, ", ".join(filter(None, [note, why])))

    # The inverse is built from the non-LRU page's first request after the swap.
    try:
        inv = inverse_input(nlru_pg, res_b, R, first_sigma.t)
    except InverseUndefined as exc:
        return PiPair(R, 4, None, pairs, cost_b, note=", ".join(filter(None, [note, str(exc)])))
    if not is_consistent(inv, f):
        return PiPair(R, 4, None, pairs, cost_b, note=", ".join(filter(None, [note, "inverse not f-consistent"])))
    res_inv = simulate_free(inv, lru_after(base_factory, j), params)
    same = res_inv.schedule == res_b.schedule
    return PiPair(R, 3, inv, pairs, cost_b, cost(res_inv, m), same, note)


@dataclass
class SurjectionReport:
    j: int
    pairs: List[PiPair]
    overflow: List[MulticoreInput]
    multiplicity: Dict[int, int]
    coverage: float
    cost_violations: List[PiPair]
    check_failures: Dict[int, List[PiPair]]

    @property
    def case_counts(self) -> Dict[int, int]:
        return dict(sorted(Counter(p.case for p in self.pairs).items()))

    def to_dict(self, with_pairs: bool = False) -> dict:
        out = {
            "j": self.j,
            "cases": {str(k): v for k, v in self.case_counts.items()},
            "multiplicity": {str(k): v for k, v in sorted(self.multiplicity.items())},
            "coverage": round(self.coverage, 6),
            "overflow": [x.to_lists() for x in self.overflow],
            "cost_violations": [p.to_dict() for p in self.cost_violations],
            "check_failures": {str(k): [p.to_dict() for p in v] for k, v in sorted(self.check_failures.items()) if v},
            "multi_pair": sum(1 for p in self.pairs if "multi-pair" in p.note),
        }
        if with_pairs:
            out["pairs"] = [p.to_dict() for p in self.pairs]
        return out


def verify_pi_surjection(scan: UniverseScan, j: int, params: SimParams,
                         base_factory: Callable[[], EvictionPolicy], f: Optional[ConcaveFunction] = None,
                         measure=CostMeasure.TOTAL_TIME) -> SurjectionReport:
    """Apply the four-case map across an f-consistent scan and audit it."""
    f = f or scan.f
    if f is None:
        raise ValueError("the map is defined on a locality-restricted scan")
    m = CostMeasure.parse(measure)
    inputs = list(scan)
    res_a = [simulate_free(R, lru_after(base_factory, j), params) for R in inputs]
    a_cost = {R: cost(r, m) for R, r in zip(inputs, res_a)}
    pairs = [pi_map(R, j, f, params, base_factory, m, r) for R, r in zip(inputs, res_a)]
    use: Counter = Counter(p.image for p in pairs if p.image is not None)
    overflow = []
    for p in pairs:
        if p.case != 4:
            continue
        choice = next((R for R in inputs if a_cost[R] > p.cost_b and use[R] < 2), None)
        if choice is None:
            overflow.append(p.source)
            continue
        p.image, p.cost_a_image = choice, a_cost[choice]
        use[choice] += 1
    hist = Counter(use.values())
    covered = sum(1 for R in inputs if use[R] > 0)
    violations = [p for p in pairs if p.image is not None and p.cost_b > p.cost_a_image]
    failures = {c: [p for p in pairs if p.case == c and p.check is False] for c in (0, 1, 2, 3)}
    return SurjectionReport(j, pairs, overflow, dict(hist), covered / max(len(inputs), 1),
                            violations, failures)
