import pytest

from mcpaging.model import (MulticoreInput, SimParams, Universe, collapse_schedule,
                            max_run_length, validate_input)


def test_validate_examples():
    assert validate_input(MulticoreInput([[0, 1], [2]]), Universe(3)).ok
    bad = validate_input(MulticoreInput([[3]]), Universe(3))
    assert not bad.ok and (bad.core, bad.index) == (1, 1)
    assert validate_input(MulticoreInput([[]]), Universe(1)).ok


def test_input_basics():
    inp = MulticoreInput([[0, 1], [2]])
    assert inp.p == 2 and inp.lengths == (2, 1) and inp.n == 3
    assert inp.pages() == {0, 1, 2}
    assert inp.concat(MulticoreInput([[5], []])).to_lists() == [[0, 1, 5], [2]]
    assert hash(inp) == hash(MulticoreInput([(0, 1), (2,)]))


def test_universe_rejects_empty():
    with pytest.raises(ValueError):
        Universe(0)


def test_params_warn_when_fewer_slots_than_cores():
    with pytest.warns(UserWarning):
        SimParams(1, 2, 2)


def test_collapse_and_runs():
    row = [7, 7, 7, 8, 9, 9]
    assert collapse_schedule(row, [3, 1, 2]) == [7, 8, 9]
    assert max_run_length(row) == 3
