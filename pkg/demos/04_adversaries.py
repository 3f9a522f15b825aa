"""Inputs built to hurt a policy.

Run with:  python3 demos/04_adversaries.py
"""

from mcpaging import LRU, SimParams, simulate_free
from mcpaging.adversary import gen_lower_shared, gen_lru_hass, ratio_curve, sequential_fif
from mcpaging.measures import miss_count

# Each core cycles through one more page than its share of the cache, so
# LRU under free interleaving misses on every request. Serving one core
# at a time with furthest-in-future pays only the cold misses.
params = SimParams(k=4, tau=3, p=2)
for ell in (1, 4, 8):
    inp = gen_lru_hass(4, 2, ell)
    print(ell, "requests", inp.n, "LRU misses", miss_count(simulate_free(inp, LRU(), params)))

curve = ratio_curve(lambda ell: gen_lru_hass(4, 2, ell), LRU, sequential_fif, range(1, 9), params)
for row in curve.rows:
    print(f"ell={row.size:2d}  LRU {row.cost_online:4d}  offline {row.cost_baseline:4d}  ratio {float(row.ratio):.3f}")

# The red/blue construction reacts to the live cache: in hard phases core 1
# asks for a red page that is absent, core 2 for an absent blue one.
g = gen_lower_shared(k=4, tau=2, ell=8, phi=2)
print("hard phases all miss:", g.hard_all_miss, "| aligned:", g.aligned,
      "| both colours cached:", g.colour_invariant)
for ph in g.phases:
    print(ph)
