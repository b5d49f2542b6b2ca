# %% [markdown]
# # Row budget
# Pi never moves data: it only relabels rows.  Longer messages add 17 rows
# per extra block.

# %%
import numpy as np

from sramhash.layout import apply_pi_remap, build_layout, capacity, parallel_messages
from sramhash.simulator import simulate_hash

# %%
lay = build_layout(32, 256)
seen = []
for step in range(24):
    apply_pi_remap(lay)
    seen.append(lay.perm_map[1])
print("row holding lane (1,0) over 24 rounds:", seen)
print("identity again:", lay.perm_map == list(range(25)))

# %%
bits = np.arange(0, 5000, 8)
rows = np.array([capacity(int(m)).rows_needed for m in bits])
for m in (0, 1080, 1088, 2168, 3256, 4344):
    print(m, capacity(m))
print("distinct row counts up to 5000 bits:", sorted(set(rows.tolist())))

# %%
run = simulate_hash(bytes(271))
print("2168-bit message:", run.rows_used, "rows,", run.program.blocks, "blocks")

# %%
for b, n in [(1, 2), (1, 8), (2, 8), (16, 16)]:
    print(f"banks={b} subarrays/2 banks={n}: {parallel_messages(b, n, 256, 64)} messages")
