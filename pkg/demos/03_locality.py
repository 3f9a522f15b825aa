"""Bounding the number of distinct pages in a window of the input.

Run with:  python3 demos/03_locality.py
"""

from mcpaging import FIFO, ConcaveFunction, MulticoreInput, SimParams
from mcpaging.locality import check_local_order, is_consistent, validate_concave, window_profile

f = ConcaveFunction([2, 2, 3, 4], p=2)
print("f valid:", validate_concave(f).ok)

inp = MulticoreInput([[0], [0, 1, 0, 2]])
# Widths 1..4: the most distinct pages any choice of per-core windows can see.
print("profile:", window_profile(inp))
print("consistent with f:", is_consistent(inp, f).ok)

# With independent window offsets per core this instance breaks the
# local-order conclusion (page 1 is served before page 0 after the cut);
# with one shared offset the precondition no longer holds.
params = SimParams(2, 2, 2)
for aligned in (False, True):
    v = check_local_order(inp, FIFO(), params, f, j=2, beta=0, delta=1, aligned=aligned)
    print("aligned" if aligned else "independent", v.status, v.reason)
