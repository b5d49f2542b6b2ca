"""One test per headline acceptance criterion.

Each test records a PASS/FAIL line in ``conftest.ACCEPTANCE_RESULTS`` (printed
in the terminal summary) before asserting, so a failing criterion still shows
up in the report with its measured values.
"""

import random
import time

import numpy as np
import pytest

from sramhash import keccak_ref as kr
from sramhash import perf_model as pm
from sramhash.bitcell_array import BitOp, Subarray, int_to_bits
from sramhash.isa_controller import (
    audit_dataflow,
    decode,
    decode_stream_bytes,
    encode,
    encode_stream_bytes,
    execute,
)
from sramhash.kat import BUNDLED_KATS, bundled_kat, run_kat
from sramhash.layout import build_layout, capacity
from sramhash.round_compiler import (
    compile_chi,
    compile_hash,
    compile_iota,
    compile_pi,
    compile_rho,
    compile_round,
    compile_round_schedules,
    compile_theta,
)
from sramhash.simulator import (
    hash_batch,
    hash_layout,
    run_stream_on_states,
    simulate_permutation,
)

from conftest import ACCEPTANCE_RESULTS, random_states
from test_isa_controller import random_command
from test_keccak_ref import KECCAK_F1600_ZERO


def record(name, ok, detail):
    ACCEPTANCE_RESULTS[name] = (bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


def test_functional_correctness():
    t0 = time.perf_counter()
    lines = []
    ok = True
    for name in BUNDLED_KATS:
        vectors = bundled_kat(name)
        sim = run_kat(vectors, hash_batch)
        ref = run_kat(vectors, lambda msgs: [kr.sha3_256(m) for m in msgs])
        ok &= sim.ok and ref.ok and sim.passed == len(vectors) - len(sim.skipped)
        lines.append(f"{name} {sim.passed}/{len(vectors)} (skipped {len(sim.skipped)})")
    elapsed = time.perf_counter() - t0
    record("functional correctness (NIST KAT via simulator)", ok and elapsed < 60,
           "; ".join(lines) + f"; {elapsed:.1f}s")


def test_permutation_kat():
    out, _, _, layout = simulate_permutation([kr.KeccakState.zeros()])
    ok = out[0].lanes == KECCAK_F1600_ZERO
    record("permutation KAT (zero state, 24 compiled rounds)", ok,
           f"match={ok}, final map identity={layout.perm_map == list(range(25))}")


def test_cycle_model_exact():
    _, report = compile_round(build_layout(32, 256), 0)
    want = {"theta": 210, "rho": 50, "pi": 0, "chi": 300, "iota": 4}
    got = {k: report.stage_cycles[k] for k in want}
    ok = got == want and report.total == 564
    record("cycle model (564 per round)", ok, f"total={report.total} stages={got}")


def test_op_counts_exact():
    theta, rho, pi, chi, iota = compile_round_schedules(build_layout(32, 256), 0)
    stream, report = compile_round(build_layout(32, 256), 0)
    facts = {
        "theta XOR": theta.op_counts["XOR"], "theta SHIFT": theta.op_counts["SHIFT"],
        "rho SHIFT": rho.op_counts["SHIFT"], "chi logic": len(chi.commands),
        "round SHIFT": report.op_counts["SHIFT"], "pi commands": len(pi.commands),
    }
    want = {"theta XOR": 50, "theta SHIFT": 5, "rho SHIFT": 25, "chi logic": 75,
            "round SHIFT": 30, "pi commands": 0}
    ok = facts == want and len(theta.commands) == 55 and len(rho.commands) == 25
    record("op counts", ok, ", ".join(f"{k}={v}" for k, v in facts.items()))


def test_liveness_bounds():
    theta, _, _, chi, _ = compile_round_schedules(build_layout(32, 256), 0)
    ok = (theta.intermediate_live_max <= 6 and chi.intermediate_live_max <= 5
          and theta.in_place >= 8)
    record("liveness bounds", ok,
           f"theta live={theta.intermediate_live_max} (<=6), chi live="
           f"{chi.intermediate_live_max} (<=5), theta in-place={theta.in_place} (>=8)")


def test_capacity():
    two = capacity(2168)
    msg = bytes(271)
    program = compile_hash(hash_layout([msg]), msg)
    single = {m: capacity(m).rows_needed for m in range(1088)}
    byte_aligned_ok = all(single[m] == 25 for m in range(0, 1088, 8))
    spill = [m for m, rows in single.items() if rows != 25]
    hard_ok = (two.rows_needed == 42 and program.rows_used == 42 and byte_aligned_ok
               and all(single[m] == 25 for m in range(1085)))
    detail = (f"capacity(2168)={two.rows_needed}, compiled program={program.rows_used}; "
              f"M<1088: 25 rows for M<=1084 and every byte-aligned M; "
              f"M={spill} need {sorted({single[m] for m in spill})} rows "
              f"(padding adds at least 4 bits)")
    if not hard_ok:
        record("capacity", False, detail)
    if spill:
        ACCEPTANCE_RESULTS["capacity"] = (False, detail)
        print(f"FAIL  capacity: {detail}")
        pytest.xfail("bit lengths 1085-1087 pad into a second block")
    record("capacity", True, detail)


def test_performance_model():
    # (profile, metric, target, tolerance); 5% where the printed value has two significant figures
    targets = [
        ("opt-sram", "latency_ns", 83.6, 0.01), ("opt-sram", "throughput_mbps", 52e3, 0.05),
        ("opt-sram", "tput_per_area", 818, 0.01), ("opt-sram", "tae", 1.8e3, 0.05),
        ("flex-sram", "latency_ns", 91.9, 0.01), ("flex-sram", "throughput_mbps", 47.3e3, 0.01),
        ("flex-sram", "tput_per_area", 123, 0.01),
        ("opt-reram", "latency_ns", 235, 0.01), ("opt-reram", "throughput_mbps", 18.6e3, 0.01),
        ("opt-reram", "tput_per_area", 970, 0.01), ("opt-reram", "tae", 2.79e3, 0.01),
        ("flex-reram", "latency_ns", 240, 0.01), ("flex-reram", "throughput_mbps", 18.1e3, 0.01),
        ("flex-reram", "tput_per_area", 322, 0.01),
    ]
    misses, worst = [], 0.0
    for name, key, target, tol in targets:
        err = abs(pm.metrics(pm.PROFILES[name])[key] - target) / target
        worst = max(worst, err)
        if err > tol:
            misses.append(f"{name}.{key} off {err:.2%}")
    record("performance model vs table", not misses,
           f"{len(targets) - len(misses)}/{len(targets)} within tolerance, worst {worst:.2%}"
           + (f"; misses: {misses}" if misses else ""))


def test_scaling_properties():
    n = np.array([4 ** i for i in range(1, 12)])
    problems = []
    capped_4m = {}
    for name, p in pm.PROFILES.items():
        free = pm.scale(p, n)
        if not np.allclose(free / n, free[0] / n[0]):
            problems.append(f"{name} not linear")
        knee = pm.saturation_keccaks(p)
        capped = pm.scale(p, n, pm.DEFAULT_POWER_CAP_W)
        below, above = n <= knee, n >= knee
        if not np.array_equal(capped[below], free[below]):
            problems.append(f"{name} capped below knee")
        flat = pm.scale(p, knee, 75)
        if not np.all(capped[above] == flat):
            problems.append(f"{name} not flat past knee")
        capped_4m[name] = pm.scale(p, 4 << 20, 75)
    top = max(capped_4m, key=capped_4m.get)
    ok = not problems and top == "opt-reram"
    record("scaling properties", ok,
           f"top at 4M capped={top}; knees=" +
           ", ".join(f"{k}:{pm.saturation_keccaks(p)}" for k, p in pm.PROFILES.items())
           + (f"; problems={problems}" if problems else ""))


def test_property_suites():
    r = random.Random(2024)
    detail = []

    # encode/decode round-trip
    widths = [r.choice([5, 8]) for _ in range(10_000)]
    cmds = [random_command(r, k) for k in widths]
    rt = all(decode(encode(c, k), k) == c for c, k in zip(cmds, widths))
    rt &= decode_stream_bytes(encode_stream_bytes(cmds, 8), 8) == cmds
    detail.append(f"round-trip 10000={rt}")

    # per-stage oracle equivalence on 1000 states
    states = random_states(77, 1000)
    stages = [(compile_theta, kr.theta), (compile_rho, kr.rho), (compile_pi, kr.pi),
              (compile_chi, kr.chi), (lambda lay: compile_iota(lay, 0), lambda s: kr.iota(s, 0))]
    stage_ok = True
    layout = build_layout(32, 256)
    for compile_fn, oracle in stages:
        before = layout.copy()
        sched = compile_fn(layout)
        after = layout.copy()
        for i in range(0, 1000, 4):
            out, _ = run_stream_on_states(sched.commands, before, after, states[i:i + 4])
            stage_ok &= out == [oracle(s) for s in states[i:i + 4]]
    detail.append(f"stage equivalence 1000={stage_ok}")

    # bitline ops vs a column-by-column boolean oracle
    sub = Subarray(32, 256)
    for i in range(32):
        sub.write_row(i, r.getrandbits(256))
    bit_ok = True
    for _ in range(200):
        a, b = r.sample(range(32), 2)
        ra, rb = sub.read_bits(a), sub.read_bits(b)
        bit_ok &= np.array_equal(int_to_bits(sub.bitline_op(BitOp.AND, a, b), 256), ra & rb)
        bit_ok &= np.array_equal(int_to_bits(sub.bitline_op(BitOp.XOR, a, b), 256), ra ^ rb)
        bit_ok &= np.array_equal(int_to_bits(sub.bitline_op(BitOp.NOR, a, b), 256), 1 - (ra | rb))
        bit_ok &= np.array_equal(int_to_bits(sub.bitline_op(BitOp.NOT, a), 256), 1 - ra)
    detail.append(f"bitline oracle={bit_ok}")

    # dataflow audit over every compiled stream: 24 rounds and a 3-block hash program
    audit_ok = True
    lay = build_layout(32, 256)
    for i in range(24):
        stream, _ = compile_round(lay, i)
        audit_ok &= audit_dataflow(stream, lay.lane_rows, lay.intermediate_rows).ok
    program = compile_hash(hash_layout([bytes(300)]), bytes(300))
    pl = program.layout
    audit_ok &= audit_dataflow(program.stream, pl.lane_rows, pl.intermediate_rows,
                               [x for g in pl.message_rows for x in g]).ok
    detail.append(f"audit={audit_ok}")

    # deterministic re-execution
    sub_a = Subarray(pl.rows, pl.cols)
    for row, v in program.preload.items():
        sub_a.write_row(row, v)
    sub_b = sub_a.copy()
    rep_a = execute(program.stream, sub_a)
    rep_b = execute(program.stream, sub_b)
    det = sub_a.cells == sub_b.cells and rep_a.as_dict() == rep_b.as_dict()
    detail.append(f"determinism={det}")

    record("property suites", rt and stage_ok and bit_ok and audit_ok and det, ", ".join(detail))

