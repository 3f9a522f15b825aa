"""Randomised invariants of the engine, the measures and the locality tools."""

import json

from hypothesis import given, settings
from hypothesis import strategies as st

from mcpaging.engine import FULL_MISS, request_split, simulate_free
from mcpaging.io import event_log, events_from_log
from mcpaging.locality import complement_input, window_profile
from mcpaging.measures import extra_time, makespan, total_time
from mcpaging.model import MulticoreInput, SimParams, collapse_schedule
from mcpaging.policies import FIFO, FWF, LRU, check_lazy

inputs = st.lists(st.lists(st.integers(0, 4), max_size=7), min_size=1, max_size=3).map(MulticoreInput)
policies = st.sampled_from([LRU, FIFO, FWF])
params = st.tuples(st.integers(1, 4), st.integers(1, 4))


def _sim(inp, pol, kt):
    k, tau = kt
    k = max(k, inp.p)  # keep clear of the stall regime here
    return simulate_free(inp, pol(), SimParams(k, tau, inp.p)), tau


@settings(max_examples=150, deadline=None)
@given(inputs, policies, params)
def test_schedule_collapses_to_input(inp, pol, kt):
    res, tau = _sim(inp, pol, kt)
    for c, seq in enumerate(inp.sequences):
        lengths = [r.length for r in res.runs[c]]
        assert collapse_schedule(res.schedule[c], lengths) == list(seq)
        assert all(1 <= n <= tau for n in lengths)


@settings(max_examples=150, deadline=None)
@given(inputs, policies, params)
def test_time_accounting(inp, pol, kt):
    res, _ = _sim(inp, pol, kt)
    assert total_time(res) == inp.n + extra_time(res)
    assert makespan(res) <= total_time(res)


@settings(max_examples=100, deadline=None)
@given(inputs, params)
def test_cache_never_overflows_and_misses_are_real(inp, kt):
    k = max(kt[0], inp.p)
    res = simulate_free(inp, LRU(), SimParams(k, kt[1], inp.p), record_states=True)
    for s in res.states:
        assert len(s["resident"]) + len(s["reserved"]) <= k
    for e in res.miss_events:
        snap = res.states[e.t - 1]
        if e.kind == FULL_MISS:
            # resident at the start of the timestep only if an earlier core evicted it since
            gone = {v for m in res.miss_events if m.t == e.t and m.seq < e.seq for v in m.evicted}
            assert e.page not in {x for x, _ in snap["resident"]} - gone


@settings(max_examples=80, deadline=None)
@given(inputs, params, st.sampled_from([LRU, FIFO]))
def test_lazy_policies_are_lazy(inp, kt, pol):
    k = max(kt[0], inp.p)
    assert check_lazy(pol, [inp], SimParams(k, kt[1], inp.p)).all_hold


@settings(max_examples=100, deadline=None)
@given(inputs, policies, params, st.integers(1, 40))
def test_request_split_partitions_input(inp, pol, kt, j):
    res, _ = _sim(inp, pol, kt)
    if not 1 <= j < res.horizon:
        return
    rp, r_at, rs = request_split(res, inp, j)
    assert rp.concat(r_at, rs) == inp


@settings(max_examples=100, deadline=None)
@given(inputs, st.integers(0, 4), st.integers(0, 4))
def test_complement_keeps_profile(inp, x, y):
    if x == y or max(inp.lengths) == 0:
        return
    comp = complement_input(inp, x, y)
    assert complement_input(comp, x, y) == inp
    assert window_profile(comp) == window_profile(inp)


@settings(max_examples=60, deadline=None)
@given(inputs, policies, params)
def test_event_log_json_round_trip(inp, pol, kt):
    res, _ = _sim(inp, pol, kt)
    assert events_from_log(json.loads(json.dumps(event_log(res)))) == res.events


@settings(max_examples=60, deadline=None)
@given(inputs, params)
def test_determinism(inp, kt):
    a, _ = _sim(inp, LRU, kt)
    b, _ = _sim(inp, LRU, kt)
    assert a.schedule == b.schedule and a.events == b.events
