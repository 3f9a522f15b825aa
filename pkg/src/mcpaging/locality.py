"""Max-Model locality: concave bounds on distinct pages per multicore window."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .engine import request_split, schedule_split, simulate_free
from .model import MulticoreInput, Page, SimParams


class WindowBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class ConcaveFunction:
    """Tabulated f(1..W). Values past the table repeat the last difference."""

    table: Tuple[float, ...]
    p: int

    def __init__(self, table: Sequence[float], p: int):
        object.__setattr__(self, "table", tuple(table))
        object.__setattr__(self, "p", int(p))

    def __call__(self, w: int) -> float:
        if w < 1:
            raise ValueError("window width must be >= 1")
        tab = self.table
        if w <= len(tab):
            return tab[w - 1]
        step = tab[-1] - tab[-2] if len(tab) >= 2 else 0
        return tab[-1] + step * (w - len(tab))

    @classmethod
    def from_json(cls, text: str) -> "ConcaveFunction":
        obj = json.loads(text)
        return cls(obj["f"], obj["p"])

    def to_dict(self) -> dict:
        return {"p": self.p, "f": list(self.table)}


@dataclass
class ConcaveVerdict:
    ok: bool
    problems: List[Tuple[str, Optional[int]]]

    def __bool__(self) -> bool:
        return self.ok


def validate_concave(f: ConcaveFunction, strict_concave: bool = False) -> ConcaveVerdict:
    """Check f(1)=p, the difference rule, non-decrease and integer surjectivity.

    By default the difference rule is the printed one, f(n+1)-f(n) <= f(n+2)-f(n+1)
    (differences never shrink). ``strict_concave=True`` uses the textbook
    direction instead (differences never grow).
    """
    tab = f.table
    problems: List[Tuple[str, Optional[int]]] = []
    if len(tab) < 2:
        return ConcaveVerdict(False, [("table needs at least two entries", None)])
    if tab[0] != f.p:
        problems.append(("f(1) != p", 1))
    diffs = [b - a for a, b in zip(tab, tab[1:])]
    for n in range(1, len(diffs)):
        d1, d2 = diffs[n - 1], diffs[n]
        bad = d1 < d2 if strict_concave else d1 > d2
        if bad:
            problems.append(("difference rule", n))
            break
    for n, d in enumerate(diffs, start=1):
        if d < 0:
            problems.append(("decreasing", n))
            break
    top = int(max(tab) // 1)
    attained = {int(v) for v in tab if float(v).is_integer()}
    for v in range(f.p, top + 1):
        if v not in attained:
            problems.append((f"integer {v} never attained", None))
            break
    return ConcaveVerdict(not problems, problems)


def _window_starts(n: int, w: int) -> range:
    return range(0, n - w + 1) if n >= w else range(0, 1)


def window_max(inp: MulticoreInput, w: int, budget: int = 2_000_000, aligned: bool = False):
    """Max distinct pages over all per-core offset choices for width w, with the offsets.

    ``aligned=True`` uses one shared offset for every core instead (windows
    are clipped at the end of shorter sequences).
    """
    seqs = inp.sequences
    if aligned:
        best, best_offsets = -1, None
        for a in _window_starts(max(len(s) for s in seqs), w):
            pages = {x for s in seqs for x in s[a:a + w]}
            if len(pages) > best:
                best, best_offsets = len(pages), (a,) * len(seqs)
        return best, best_offsets
    choices = []
    total = 1
    for s in seqs:
        starts = _window_starts(len(s), w)
        # distinct page sets per offset, deduplicated to keep the product small
        sets = {}
        for a in starts:
            sets.setdefault(frozenset(s[a:a + w]), a)
        opts = sorted(((a, pages) for pages, a in sets.items()), key=lambda x: x[0])
        choices.append(opts)
        total *= len(opts)
    if total > budget:
        raise WindowBudgetError(f"window width {w} needs {total} offset combinations")
    best, best_offsets = -1, None
    for combo in itertools.product(*choices):
        pages = frozenset().union(*(c[1] for c in combo))
        if len(pages) > best:
            best, best_offsets = len(pages), tuple(c[0] for c in combo)
    return best, best_offsets


def window_profile(inp: MulticoreInput, w_max: Optional[int] = None, aligned: bool = False) -> Dict[int, int]:
    """Map each width 1..w_max to its maximum distinct-page count."""
    longest = max(inp.lengths, default=0)
    if w_max is None:
        w_max = longest
    if w_max > longest:
        raise ValueError(f"w_max={w_max} exceeds the longest sequence ({longest})")
    return {w: window_max(inp, w, aligned=aligned)[0] for w in range(1, w_max + 1)}


@dataclass
class Consistency:
    ok: bool
    width: Optional[int] = None
    offsets: Optional[Tuple[int, ...]] = None  # 0-based starts per core
    distinct: Optional[int] = None
    bound: Optional[float] = None

    def __bool__(self) -> bool:
        return self.ok


def is_consistent(inp: MulticoreInput, f: ConcaveFunction, aligned: bool = False) -> Consistency:
    for w in range(1, max(inp.lengths, default=0) + 1):
        d, offs = window_max(inp, w, aligned=aligned)
        if d > f(w):
            return Consistency(False, w, offs, d, f(w))
    return Consistency(True)


def complement_input(inp: MulticoreInput, beta: Page, delta: Page) -> MulticoreInput:
    if beta == delta:
        raise ValueError("complement needs two distinct pages")
    sw = {beta: delta, delta: beta}
    return MulticoreInput([[sw.get(x, x) for x in s] for s in inp.sequences])


def duplicate_request(inp: MulticoreInput, core: int, index: int) -> MulticoreInput:
    """Insert a copy of request ``index`` (0-based) right after itself."""
    seqs = inp.to_lists()
    seqs[core].insert(index, seqs[core][index])
    return MulticoreInput(seqs)


@dataclass
class LocalOrderVerdict:
    status: str  # "pass", "fail" or "not applicable"
    reason: str = ""
    first_beta: Optional[int] = None
    first_delta: Optional[int] = None

    def to_dict(self) -> dict:
        return dict(status=self.status, reason=self.reason,
                    first_beta=self.first_beta, first_delta=self.first_delta)


def _first_step(rows, page, offset) -> Optional[int]:
    """Earliest 1-based timestep (rows start at ``offset``+1) where any core serves page."""
    best = None
    for row in rows:
        for idx, x in enumerate(row):
            if x == page:
                t = offset + idx + 1
                best = t if best is None else min(best, t)
                break
    return best


def _last_step(rows, page) -> Optional[int]:
    best = None
    for row in rows:
        for idx in range(len(row) - 1, -1, -1):
            if row[idx] == page:
                best = idx + 1 if best is None else max(best, idx + 1)
                break
    return best


def check_local_order(inp: MulticoreInput, policy, params: SimParams, f: ConcaveFunction,
                      j: int, beta: Page, delta: Page, result=None,
                      aligned: bool = False) -> LocalOrderVerdict:
    """Test the local-order property's two conclusions on one instance.

    Preconditions: beta is served in timesteps 1..j, delta is not served at
    or after beta's last such timestep, R is f-consistent, and the input
    whose unserved part is complemented is not.
    """
    if result is None:
        result = simulate_free(inp, policy, params)
    if not 1 <= j < result.horizon:
        return LocalOrderVerdict("not applicable", "j out of range")
    pre, _, _ = schedule_split(result, j)
    last_b = _last_step(pre, beta)
    if last_b is None:
        return LocalOrderVerdict("not applicable", "beta not served by timestep j")
    for row in pre:
        if delta in row[last_b - 1:]:
            return LocalOrderVerdict("not applicable", "delta served after beta in the prefix")
    if not is_consistent(inp, f, aligned):
        return LocalOrderVerdict("not applicable", "input not f-consistent")
    rp, r_at, rs = request_split(result, inp, j)
    rest = r_at.concat(rs)
    flipped = rp.concat(complement_input(rest, beta, delta))
    if is_consistent(flipped, f, aligned):
        return LocalOrderVerdict("not applicable", "complemented input is consistent")
    if not any(beta in s for s in rest.sequences):
        return LocalOrderVerdict("fail", "unserved part has no beta")
    suffix_rows = [row[j:] for row in result.schedule]
    fb = _first_step(suffix_rows, beta, j)
    fd = _first_step(suffix_rows, delta, j)
    if fd is not None and (fb is None or fd < fb):
        return LocalOrderVerdict("fail", "delta served before beta after j", fb, fd)
    return LocalOrderVerdict("pass", "", fb, fd)
