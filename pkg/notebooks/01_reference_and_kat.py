# %% [markdown]
# # Reference Keccak and the NIST vectors
# The pure-Python reference is the oracle for everything else, so start by
# checking it against hashlib and the bundled CAVP files.

# %%
import hashlib

from sramhash import keccak_ref as kr
from sramhash.kat import BUNDLED_KATS, bundled_kat, run_kat

# %%
for msg in [b"", b"abc", bytes(271)]:
    ours = kr.sha3_256(msg).hex()
    print(len(msg), ours[:16], ours == hashlib.sha3_256(msg).hexdigest())

# %% [markdown]
# A single set bit in lane (0,0) shows how theta spreads a column parity:
# the neighbour sheet to the right gets it unrotated, the one to the left
# gets it rotated by one.

# %%
s = kr.KeccakState.zeros().with_lane(0, 0, 1)
t = kr.theta(s)
for x in range(5):
    print(x, [hex(t[x, y]) for y in range(5)])

# %%
for name in BUNDLED_KATS:
    result = run_kat(bundled_kat(name), lambda msgs: [kr.sha3_256(m) for m in msgs])
    print(name, result.summary())
