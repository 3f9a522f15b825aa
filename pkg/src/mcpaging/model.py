"""Shared vocabulary: pages, inputs, parameters and schedules.

Pages are dense integers ``0..|U|-1``. Human-readable names only appear
when rendering (see :mod:`mcpaging.io`).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

Page = int


@dataclass(frozen=True)
class Universe:
    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("universe size must be >= 1")


@dataclass(frozen=True)
class MulticoreInput:
    """p request sequences, one per core. Stored as tuples so it is hashable."""

    sequences: Tuple[Tuple[Page, ...], ...]

    def __init__(self, sequences: Iterable[Iterable[Page]]):
        seqs = tuple(tuple(int(x) for x in s) for s in sequences)
        if len(seqs) < 1:
            raise ValueError("an input needs at least one core")
        object.__setattr__(self, "sequences", seqs)

    @property
    def p(self) -> int:
        return len(self.sequences)

    @property
    def lengths(self) -> Tuple[int, ...]:
        return tuple(len(s) for s in self.sequences)

    @property
    def n(self) -> int:
        return sum(self.lengths)

    def pages(self) -> set:
        return {x for s in self.sequences for x in s}

    def __getitem__(self, i: int) -> Tuple[Page, ...]:
        return self.sequences[i]

    def __len__(self) -> int:
        return len(self.sequences)

    def concat(self, *others: "MulticoreInput") -> "MulticoreInput":
        out = [list(s) for s in self.sequences]
        for o in others:
            if o.p != self.p:
                raise ValueError("core counts differ")
            for i, s in enumerate(o.sequences):
                out[i].extend(s)
        return MulticoreInput(out)

    def to_lists(self) -> list:
        return [list(s) for s in self.sequences]


@dataclass(frozen=True)
class SimParams:
    k: int
    tau: int
    p: Optional[int] = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("cache size k must be >= 1")
        if self.tau < 1:
            raise ValueError("fetch delay tau must be >= 1")
        if self.p is not None:
            if self.p < 1:
                raise ValueError("core count must be >= 1")
            if self.k < self.p:
                warnings.warn("k < p: cores may stall with every slot reserved", stacklevel=2)


@dataclass(frozen=True)
class Validation:
    ok: bool
    core: Optional[int] = None  # 1-based
    index: Optional[int] = None  # 1-based

    def __bool__(self) -> bool:
        return self.ok


def validate_input(inp: MulticoreInput, universe: Universe) -> Validation:
    """Accept iff every page id lies in the universe; otherwise name the first offender."""
    for c, seq in enumerate(inp.sequences):
        for idx, page in enumerate(seq):
            if page < 0 or page >= universe.size:
                return Validation(False, c + 1, idx + 1)
    return Validation(True)


def collapse_schedule(row: Sequence, run_lengths: Sequence[int]) -> list:
    """Undo miss repetitions of one core's schedule given each request's run length."""
    out, pos = [], 0
    for length in run_lengths:
        out.append(row[pos])
        pos += length
    if pos != len(row):
        raise ValueError("run lengths do not cover the schedule")
    return out


def max_run_length(row: Sequence) -> int:
    best, cur, prev = 0, 0, object()
    for x in row:
        cur = cur + 1 if x == prev else 1
        prev = x
        best = max(best, cur)
    return best
