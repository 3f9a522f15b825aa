import pytest

from mcpaging import LRU, MulticoreInput, SimParams, simulate_free

# The golden trace names pages a1..a5; here a_i is page i-1.
A1, A2, A3, A4, A5 = range(5)
GOLDEN = MulticoreInput([[A1, A2, A1, A5], [A3, A4, A5, A2]])
GOLDEN_PARAMS = SimParams(4, 3, 2)


@pytest.fixture
def golden_run():
    return simulate_free(GOLDEN, LRU(), GOLDEN_PARAMS)
