"""File formats: JSON inputs, concave tables, event logs, CSV costs and text traces."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .engine import HitEvent, MissEvent, SimResult, simulate_free
from .locality import ConcaveFunction
from .measures import makespan, miss_count, total_time
from .model import MulticoreInput, SimParams, Universe, validate_input

PathLike = Union[str, Path]


class InputFormatError(ValueError):
    pass


def _read_text(src) -> str:
    if isinstance(src, Path) or (isinstance(src, str) and not src.lstrip().startswith("{")):
        return Path(src).read_text()
    return src


def load_input(src) -> Tuple[MulticoreInput, Universe, Optional[SimParams], Dict[int, str]]:
    """Parse the JSON input format from a path or a JSON string.

    ``{"universe": U, "params": {"k": k, "tau": tau}, "sequences": [[...], ...]}``
    with an optional ``"aliases": {"0": "a1", ...}`` used only for display.
    """
    try:
        obj = json.loads(_read_text(src))
    except json.JSONDecodeError as e:
        raise InputFormatError(f"not valid JSON: {e}") from None
    if not isinstance(obj, dict) or "sequences" not in obj or "universe" not in obj:
        raise InputFormatError("input needs 'universe' and 'sequences'")
    seqs = obj["sequences"]
    if not isinstance(seqs, list) or not all(isinstance(s, list) for s in seqs):
        raise InputFormatError("'sequences' must be a list of lists")
    if not all(isinstance(x, int) and not isinstance(x, bool) for s in seqs for x in s):
        raise InputFormatError("pages must be integers")
    inp = MulticoreInput(seqs)
    universe = Universe(int(obj["universe"]))
    v = validate_input(inp, universe)
    if not v.ok:
        raise InputFormatError(f"page out of range at core {v.core}, index {v.index}")
    params = None
    if "params" in obj:
        pr = obj["params"]
        params = SimParams(int(pr["k"]), int(pr["tau"]), inp.p)
    aliases = {int(key): str(val) for key, val in obj.get("aliases", {}).items()}
    return inp, universe, params, aliases


def dump_input(inp: MulticoreInput, universe: int, params: Optional[SimParams] = None,
               aliases: Optional[Dict[int, str]] = None, extra: Optional[dict] = None) -> str:
    obj: dict = {"universe": universe}
    if params is not None:
        obj["params"] = {"k": params.k, "tau": params.tau}
    obj["sequences"] = inp.to_lists()
    if aliases:
        obj["aliases"] = {str(key): val for key, val in sorted(aliases.items())}
    if extra:
        obj.update(extra)
    return json.dumps(obj, sort_keys=True)


def load_concave(src) -> ConcaveFunction:
    try:
        return ConcaveFunction.from_json(_read_text(src))
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise InputFormatError(f"bad concave-function file: {e}") from None


# ------------------------------------------------------------ event logs

def event_to_dict(e) -> dict:
    if isinstance(e, HitEvent):
        return {"seq": e.seq, "t": e.t, "core": e.core + 1, "page": e.page, "kind": "hit",
                "index": e.index + 1}
    return {"seq": e.seq, "t": e.t, "core": e.core + 1, "page": e.page, "kind": e.kind,
            "length": e.length, "evicted": list(e.evicted), "lru_choice": e.lru_choice,
            "free_before": e.free_before, "stall": e.stall, "index": e.index + 1}


def event_from_dict(d: dict):
    if d["kind"] == "hit":
        return HitEvent(d["seq"], d["t"], d["core"] - 1, d["page"], d["index"] - 1)
    return MissEvent(d["seq"], d["t"], d["core"] - 1, d["page"], d["kind"], d["length"],
                     tuple(d["evicted"]), d["lru_choice"], d["free_before"], d["stall"],
                     d["index"] - 1)


def cost_summary(result: SimResult) -> dict:
    return {"total_time": total_time(result), "makespan": makespan(result),
            "miss_count": miss_count(result), "per_core_finish": list(result.per_core_finish)}


def event_log(result: SimResult) -> dict:
    return {
        "policy": result.policy_name,
        "params": {"k": result.params.k, "tau": result.params.tau},
        "mode": result.mode,
        "sequences": result.inp.to_lists(),
        "schedule": [list(row) for row in result.schedule],
        "events": [event_to_dict(e) for e in result.events],
        "costs": cost_summary(result),
    }


def events_from_log(log: dict) -> list:
    return [event_from_dict(d) for d in log["events"]]


# ------------------------------------------------------------ text trace

def _name(x, aliases: Dict[int, str]) -> str:
    if x is None:
        return "⊥"
    return aliases.get(x, str(x))


def trace_table(result: SimResult, aliases: Optional[Dict[int, str]] = None) -> str:
    """One line per timestep: cache before it, what each core does, and the schedule tuple.

    Needs a result simulated with ``record_states=True``; it is re-run otherwise.
    """
    aliases = aliases or {}
    if result.states is None:
        if result.mode != "free":
            raise ValueError("trace tables are drawn for free-interleaving runs")
        from .policies import make_policy

        result = simulate_free(result.inp, make_policy(result.policy_name, result.inp),
                               result.params, record_states=True)
    status: Dict[Tuple[int, int], str] = {}
    for c, runs in enumerate(result.runs):
        for r in runs:
            for dt in range(r.length):
                label = {"hit": "hit", "FullMiss": "fetch", "SharedWait": "wait"}[r.kind]
                status[(r.start + dt, c)] = label
    p = result.inp.p
    head = ["t", "cache before"] + [f"P{c + 1}" for c in range(p)] + ["schedule"]
    lines = []
    for i, st in enumerate(result.states):
        t = i + 1
        cache = [f"{_name(x, aliases)}:{tag}" for x, tag in st["resident"]]
        cache += [f"{_name(x, aliases)}*" for x, _ in st["reserved"]]
        cells = [str(t), " ".join(cache) or "-"]
        tup = []
        for c in range(p):
            row = result.schedule[c]
            page = row[i] if i < len(row) else None
            tup.append(_name(page, aliases))
            cells.append(f"{_name(page, aliases)} {status.get((t, c), 'done')}" if page is not None else "⊥")
        cells.append("(" + ", ".join(tup) + ")")
        lines.append(cells)
    widths = [max(len(r[i]) for r in [head] + lines) for i in range(len(head))]
    fmt = lambda row: "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
    return "\n".join([fmt(head)] + [fmt(r) for r in lines]) + "\n"


# ------------------------------------------------------------ CSV

def costs_csv(inputs: List[MulticoreInput], columns: Dict[str, list]) -> str:
    """Rows of input id, length vector, input and one cost column per (policy, measure)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    w.writerow(["id", "n_vector", "input"] + names)
    for i, inp in enumerate(inputs):
        w.writerow([i, " ".join(map(str, inp.lengths)), json.dumps(inp.to_lists())]
                   + [int(columns[n][i]) for n in names])
    return buf.getvalue()
