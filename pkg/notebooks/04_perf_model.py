# %% [markdown]
# # Throughput, area, energy
# Each engine variant is a frequency, an area and an energy per round; the
# cycle count comes from the compiler.

# %%
import numpy as np

from sramhash import perf_model as pm
from sramhash.layout import build_layout
from sramhash.round_compiler import compile_round

# %%
_, report = compile_round(build_layout(32, 256), 0)
assert report.total == pm.PROFILES["opt-sram"].cycles_per_round

for row in pm.report_rows(include_baselines=False):
    print(f"{row['name']:10s} {row['latency_ns']:7.1f} ns {row['throughput_mbps']:9.0f} Mbps "
          f"{row['tput_per_area']:6.0f} Mbps/KGE  TAE {row['tae']:7.0f}  {row['flag']}")

# %% [markdown]
# Under a 75 W budget each curve stops growing once the engines it can
# power are all busy.

# %%
n = np.array([4 ** i for i in range(1, 12)])
for name, p in pm.PROFILES.items():
    capped = pm.scale(p, n, 75) / 1e6
    print(f"{name:10s} knee={pm.saturation_keccaks(p):7d}  Tbps at 4M: {capped[-1]:.1f}")

# %%
small = {k: pm.scale(p, 4096, 75) for k, p in pm.PROFILES.items()}
large = {k: pm.scale(p, 4 << 20, 75) for k, p in pm.PROFILES.items()}
print("4K :", {k: round(small["opt-sram"] / v, 2) for k, v in small.items()})
print("4M :", {k: round(large["opt-reram"] / v, 2) for k, v in large.items()})
