"""Comparing eviction policies over every small input.

Run with:  python3 demos/02_comparing_policies.py
"""

from mcpaging import SimParams
from mcpaging.analysis import bijective_relation, cost_table, cyclic_relation, enumerate_universe

params = SimParams(k=2, tau=2, p=2)

# Every input over three pages with at most three requests per core.
scan = enumerate_universe(3, 2, 3)
print(f"{len(scan)} inputs")

# LRU and FIFO are both lazy, and within each length class their costs
# are the same multiset: neither is better under a bijective comparison.
lru_fifo = cost_table("lru", "fifo", scan, "total-time", params)
print("lru vs fifo:", bijective_relation(lru_fifo).summary())

# Flush-when-full is never better and sometimes worse.
lru_fwf = cost_table("lru", "fwf", scan, "total-time", params)
rep = bijective_relation(lru_fwf)
print("lru vs fwf:", rep.summary(), "| first differing length class:", rep.witness["partition"])

# The cyclic comparison pools all lengths, so it is only sound up to a
# cost every cheaper input is known for. Capping the total length at 7
# makes every total time <= 7 complete.
wide = enumerate_universe(3, 2, None, max_total=7)
t = cost_table("lru", "fwf", wide, "total-time", params)
cyc = cyclic_relation(t)
print(f"cyclic up to cost {cyc.horizon}:", cyc.summary(), cyc.witness)
