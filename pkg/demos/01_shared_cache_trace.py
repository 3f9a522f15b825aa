"""Two cores, one shared cache of four slots, fetch delay three.

Run with:  python3 demos/01_shared_cache_trace.py
"""

from mcpaging import LRU, MulticoreInput, SimParams, request_split, schedule_split, simulate_free
from mcpaging.io import cost_summary, trace_table

names = {0: "a1", 1: "a2", 2: "a3", 3: "a4", 4: "a5"}
inp = MulticoreInput([[0, 1, 0, 4], [2, 3, 4, 1]])
res = simulate_free(inp, LRU(), SimParams(k=4, tau=3), record_states=True)

# Each row shows the cache at the start of the timestep (page:tag, or page*
# while a fetch is in flight) and what each core is doing.
print(trace_table(res, names))

# At timestep 7 core 1 hits a1 first, so when core 2 misses on a5 the
# least recently used page is a3. Core 1 then asks for a5 while it is still
# being fetched and waits two steps instead of three.
for e in res.miss_events:
    label = f"P{e.core + 1} t={e.t} {names[e.page]} {e.kind} ({e.length} steps)"
    if e.evicted:
        label += f", evicts {[names[v] for v in e.evicted]}"
    print(label)
print(cost_summary(res))

# Cutting the run after timestep 4: which requests had begun by then?
show = lambda rows: [[names[x] for x in row] for row in rows]
pre, at, suf = schedule_split(res, 4)
rp, r_at, rs = request_split(res, inp, 4)
print("schedule prefix", show(pre), "in service at 5", [names[x] for x in at])
print("request prefix", show(rp.sequences), "requests still to start", show(rs.sequences))
