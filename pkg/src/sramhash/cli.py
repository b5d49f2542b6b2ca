"""Command-line front end.

Exit codes: 0 success, 1 digest mismatch or KAT failure, 2 bad configuration
(geometry, capacity, profile, malformed input), 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import keccak_ref, perf_model
from .bitcell_array import CycleCostModel
from .isa_controller import (
    CommandStream,
    parse_stream_file,
    row_index_bits,
    trace_lines,
    write_stream_file,
)
from .kat import BUNDLED_KATS, KatFormatError, bundled_kat, read_kat, run_kat
from .layout import LayoutError, build_layout, capacity
from .round_compiler import CapacityError, compile_round
from .simulator import hash_batch, simulate_hash

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

DEFAULT_SWEEP = [4 ** i for i in range(12)]  # 1 .. 4M


class ConfigError(Exception):
    pass


def _cost(args) -> CycleCostModel:
    return CycleCostModel(load_cycles=args.load_cycles)


def _message(args) -> bytes:
    if args.msg_file:
        return Path(args.msg_file).read_bytes()
    if args.msg is None:
        raise ConfigError("give --msg HEX or --msg-file PATH")
    try:
        return bytes.fromhex(args.msg)
    except ValueError:
        raise ConfigError(f"--msg is not hex: {args.msg!r}") from None


def _write(out: str | None, text: str) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_hash(args) -> int:
    msg = _message(args)
    run = simulate_hash(msg, rows=args.rows, cols=args.cols, cost=_cost(args))
    digest = run.digests[0]
    expected = keccak_ref.sha3_256(msg)
    match = digest == expected
    cap = capacity(8 * len(msg))
    print(f"digest: {digest.hex()}")
    print(f"match: {str(match).lower()}")
    print(f"blocks: {cap.blocks}  rows used: {run.rows_used}  "
          f"subarray: {run.program.layout.rows}x{run.program.layout.cols}")
    per_round = run.report.round_cycles // (24 * cap.blocks)
    print(f"cycles per round: {per_round}")
    for stage, cyc in run.report.stage_cycles.items():
        print(f"  {stage}: {cyc}")
    print(f"total cycles: {run.report.total}")
    if args.trace:
        Path(args.trace).write_text("\n".join(trace_lines(run.program.stream, _cost(args))) + "\n")
    return EXIT_OK if match else EXIT_MISMATCH


def cmd_verify(args) -> int:
    sources = args.kat or [None]
    ok = True
    for src in sources:
        vectors = read_kat(src) if src else [v for n in BUNDLED_KATS for v in bundled_kat(n)]
        label = src or "bundled SHA3-256 short+long"
        result = run_kat(vectors, lambda msgs: hash_batch(msgs, cols=args.cols))
        print(f"{label}: {result.summary()}")
        if result.failed:
            print("  failed vectors: " + " ".join(str(i) for i in result.failed))
        ok &= result.ok
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_report(args) -> int:
    profiles = [perf_model.get_profile(n) for n in args.profile] if args.profile else None
    rows = perf_model.report_rows(profiles, include_baselines=not args.no_baselines)
    text = perf_model.report_json(rows) if args.format == "json" else perf_model.report_csv(rows)
    _write(args.out, text)
    return EXIT_OK


def cmd_scale(args) -> int:
    p = perf_model.get_profile(args.profile[0] if args.profile else "opt-sram")
    n_list = [int(v) for v in args.n.split(",")] if args.n else DEFAULT_SWEEP
    _write(args.out, perf_model.scaling_csv(p, n_list, args.cap_watts))
    return EXIT_OK


def cmd_trace(args) -> int:
    cost = _cost(args)
    if args.msg is not None or args.msg_file:
        run = simulate_hash(_message(args), rows=args.rows, cols=args.cols, cost=cost)
        layout = run.program.layout
        stream = run.program.stream
    else:
        layout = build_layout(args.rows or 32, args.cols)
        stream = CommandStream.concat(compile_round(layout, i, cost)[0]
                                      for i in range(args.rounds))
    k = row_index_bits(layout.rows)
    out = args.out or "stream.bin"
    write_stream_file(out, stream, k)
    decoded, _ = parse_stream_file(Path(out).read_bytes())
    if decoded.commands != stream.commands:
        print("binary stream does not decode back to the compiled stream", file=sys.stderr)
        return EXIT_MISMATCH
    _write(args.text, "\n".join(trace_lines(stream, cost)) + "\n")
    print(f"{len(stream)} commands, k={k}, written to {out}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", action="append",
                        help=f"profile name or JSON file (${perf_model.PROFILE_DIR_ENV} "
                             "is searched for <name>.json); repeatable for report")
    common.add_argument("--rows", type=int, help="subarray rows (default: sized to the message)")
    common.add_argument("--cols", type=int, default=256)
    common.add_argument("--msg", help="message as hex ('' for empty)")
    common.add_argument("--msg-file", help="message as raw file bytes")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--load-cycles", type=int, default=0, help="cycles charged per LOAD")

    parser = argparse.ArgumentParser(prog="sramhash", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hash", parents=[common], help="hash one message on the simulator")
    p.add_argument("--trace", help="also write the text trace here")
    p.set_defaults(func=cmd_hash)

    p = sub.add_parser("verify", parents=[common], help="run KAT files through the simulator")
    p.add_argument("--kat", action="append", help="NIST-style KAT file (default: bundled)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", parents=[common], help="metrics table vs published rows")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--no-baselines", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("scale", parents=[common], help="throughput vs parallel permutations")
    p.add_argument("--n", help="comma-separated permutation counts")
    p.add_argument("--cap-watts", type=float, help="power cap in watts (default: none)")
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("trace", parents=[common], help="write a compiled stream and its trace")
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--text", help="text trace path (default stdout)")
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, LayoutError, CapacityError, KatFormatError,
            perf_model.ProfileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
