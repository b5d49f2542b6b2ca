# %% [markdown]
# # Compiling a round and running it on the subarray
# One state lives in each 64-column tile; every command acts on all tiles.

# %%
import random
from collections import Counter

from sramhash import keccak_ref as kr
from sramhash.isa_controller import trace_lines
from sramhash.layout import build_layout
from sramhash.round_compiler import compile_round, compile_round_schedules
from sramhash.simulator import simulate_permutation

# %%
layout = build_layout(32, 256)
for sched in compile_round_schedules(layout, 0):
    print(f"{sched.stage:6s} cmds={len(sched.commands):3d} cycles={sched.cycles():3d} "
          f"live={sched.intermediate_live_max} in_place={sched.in_place} {dict(sched.op_counts)}")

# %%
stream, report = compile_round(build_layout(32, 256), 0)
print(len(stream), "commands,", report.total, "cycles")
print("\n".join(list(trace_lines(stream))[:8]))

# %% [markdown]
# Four random states at once through all 24 rounds, checked against the reference.

# %%
r = random.Random(1)
states = [kr.KeccakState.random(r) for _ in range(4)]
out, report, stream, final = simulate_permutation(states)
print(all(a == kr.keccak_f(b) for a, b in zip(out, states)), report.total, len(stream))
print("lane map back to identity:", final.perm_map == list(range(25)))
print(Counter(c.mnemonic for c in stream))
