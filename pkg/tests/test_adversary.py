from fractions import Fraction

import pytest

from mcpaging.adversary import gen_lower_shared, gen_lru_hass, ratio_curve, sequential_fif
from mcpaging.engine import FULL_MISS, simulate_free
from mcpaging.measures import miss_count
from mcpaging.model import MulticoreInput, SimParams
from mcpaging.policies import FIFO, LRU


def test_lru_hass_shape():
    inp = gen_lru_hass(4, 2, 2)
    assert inp.to_lists() == [[0, 1, 2, 0, 1, 2], [3, 4, 5, 3, 4, 5]] and inp.n == 12
    assert gen_lru_hass(2, 2, 1).to_lists() == [[0, 1], [2, 3]]
    with pytest.raises(ValueError):
        gen_lru_hass(3, 2, 1)


@pytest.mark.parametrize("ell", range(1, 9))
def test_lru_misses_every_request(ell):
    inp = gen_lru_hass(4, 2, ell)
    params = SimParams(4, 2, 2)
    res = simulate_free(inp, LRU(), params)
    assert miss_count(res) == inp.n
    assert miss_count(sequential_fif(inp, params)) == 6


def test_ratio_curve_trend_and_closed_form():
    params = SimParams(4, 3, 2)
    curve = ratio_curve(lambda l: gen_lru_hass(4, 2, l), LRU, sequential_fif, range(1, 9), params)
    assert curve.strictly_increasing
    # TotalTime ratio: LRU takes tau*n, sequential FIF 2*tau*ell/((p+1)(tau+ell-1)) of that
    for row in curve.rows:
        ell = row.size
        assert row.ratio == Fraction(2 * 3 * ell, 3 * (3 + ell - 1))
    misses = ratio_curve(lambda l: gen_lru_hass(4, 2, l), LRU, sequential_fif, range(1, 9), params,
                         "miss-count")
    for row in misses.rows:
        assert row.ratio == Fraction(row.n, 2 * (4 // 2 + 1))


def test_ratio_curve_flat_for_constant_input():
    params = SimParams(2, 2, 1)
    curve = ratio_curve(lambda l: MulticoreInput([[0] * l]), LRU, sequential_fif, range(1, 5), params)
    assert all(r.ratio == 1 for r in curve.rows)
    assert curve.non_decreasing and not curve.strictly_increasing


def test_lower_shared_tiny_instance():
    g = gen_lower_shared(4, 2, 8, 2)
    assert g.hard_all_miss and g.aligned and g.colour_invariant
    assert g.inp.lengths == (48, 48)
    assert g.inp.sequences[0][:8] == (0, 1) * 4
    assert g.inp.sequences[1][:8] == (4, 5) * 4
    # hard phases use one colour per core
    for ph in g.phases:
        seq = g.inp.sequences[ph["core"] - 1][ph["start"]:ph["end"]]
        if ph["kind"] == "hard":
            colour = g.red if ph["core"] == 1 else g.blue
            assert set(seq) <= set(colour)


def test_lower_shared_replay_is_self_consistent():
    g = gen_lower_shared(4, 3, 8, 3)
    again = simulate_free(g.inp, LRU(), SimParams(4, 3, 2))
    assert again.schedule == g.replay.schedule
    easy_hits = all(g.replay.runs[ph["core"] - 1][i].kind == "hit"
                    for ph in g.phases if ph["kind"] == "easy" and ph["round"] > 1
                    for i in range(ph["start"], ph["end"]))
    assert easy_hits


def test_lower_shared_first_round_only():
    g = gen_lower_shared(4, 2, 8, 0)
    assert g.inp.lengths == (16, 16) and {ph["round"] for ph in g.phases} == {1}


def test_lower_shared_other_target():
    g = gen_lower_shared(4, 2, 8, 1, target=FIFO)
    assert g.hard_all_miss


def test_lower_shared_rejects_bad_parameters():
    with pytest.raises(ValueError):
        gen_lower_shared(3, 2, 8, 1)
    with pytest.raises(ValueError):
        gen_lower_shared(4, 2, 2, 1)
