import pytest

from mcpaging.analysis import enumerate_universe
from mcpaging.engine import simulate_free
from mcpaging.measures import (BudgetError, CostMeasure, bounded_shared_cost_check, cost,
                               extra_time, makespan, miss_count, total_time)
from mcpaging.model import MulticoreInput, SimParams
from mcpaging.policies import FIFO, LRU


def test_golden_costs(golden_run):
    assert total_time(golden_run) == 19
    assert makespan(golden_run) == 10
    assert miss_count(golden_run) == 6


def test_all_hits():
    res = simulate_free(MulticoreInput([[0, 0], [0, 0, 0]]), LRU(), SimParams(2, 1, 2),
                        initial={0: 0})
    assert total_time(res) == 5 and miss_count(res) == 0


def test_single_core_closed_form():
    seq = [0, 1, 2, 0, 3, 1]
    tau = 4
    res = simulate_free(MulticoreInput([seq]), LRU(), SimParams(2, tau))
    f = sum(1 for e in res.miss_events)
    assert total_time(res) == len(seq) + f * (tau - 1)
    assert makespan(res) == total_time(res)


def test_compulsory_only():
    res = simulate_free(MulticoreInput([[0, 1, 2]]), LRU(), SimParams(3, 2))
    assert miss_count(res) == 3


def test_extra_time_identity_over_universe():
    params = SimParams(2, 3, 2)
    for inp in enumerate_universe(3, 2, 2):
        res = simulate_free(inp, FIFO(), params)
        assert total_time(res) - inp.n == extra_time(res)
        assert makespan(res) <= total_time(res)


def test_adding_a_request_never_lowers_total_time():
    params = SimParams(2, 2, 2)
    scan = enumerate_universe(3, 2, 2)
    for inp in scan:
        base = total_time(simulate_free(inp, LRU(), params))
        for core in range(2):
            for x in range(3):
                seqs = inp.to_lists()
                seqs[core].append(x)
                assert total_time(simulate_free(MulticoreInput(seqs), LRU(), params)) >= base


def test_measure_parsing():
    assert CostMeasure.parse("total_time") is CostMeasure.TOTAL_TIME
    assert CostMeasure.parse("Makespan") is CostMeasure.MAKESPAN
    with pytest.raises(ValueError):
        CostMeasure.parse("latency")


def test_boundedness_single_page_total_time():
    rep = bounded_shared_cost_check("total-time", LRU, 1, SimParams(1, 2, 1), 4, p=1)
    assert rep.verdict == "bounded"
    assert rep.counts == {2: 1, 3: 1, 4: 1}


def test_boundedness_miss_count_witness():
    rep = bounded_shared_cost_check("miss-count", LRU, 1, SimParams(1, 2, 1), 2, p=1)
    assert rep.verdict == "unbounded"
    assert [w["cost"] for w in rep.witness] == [1, 1, 1]
    assert [w["input"] for w in rep.witness] == [[[0]], [[0, 0]], [[0, 0, 0]]]


def test_boundedness_makespan_two_cores():
    rep = bounded_shared_cost_check("makespan", LRU, 2, SimParams(2, 2, 2), 3, p=2)
    assert rep.verdict == "bounded" and rep.horizon == 6


def test_boundedness_budget():
    with pytest.raises(BudgetError):
        bounded_shared_cost_check("total-time", LRU, 3, SimParams(2, 2, 2), 30, p=2)


def test_cost_dispatch(golden_run):
    assert cost(golden_run, "makespan") == 10
