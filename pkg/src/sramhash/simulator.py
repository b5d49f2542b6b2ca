"""End-to-end runs: place data, execute compiled streams, read results back."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import keccak_ref
from .bitcell_array import CycleCostModel, Subarray
from .isa_controller import CommandStream, CycleReport, execute
from .keccak_ref import KeccakState
from .layout import TileLayout, build_layout, capacity, lane_row, rows_for_layout
from .round_compiler import HashProgram, compile_hash, compile_permutation


def new_subarray(layout: TileLayout) -> Subarray:
    return Subarray(layout.rows, layout.cols, shifter_width=layout.w)


def load_states(sub: Subarray, layout: TileLayout, states: Sequence[KeccakState]) -> None:
    """Write one state per tile through the current lane map; unused tiles are zeroed."""
    if len(states) > layout.tile_count:
        raise ValueError(f"{len(states)} states but only {layout.tile_count} tiles")
    for y in range(5):
        for x in range(5):
            v = 0
            for t, s in enumerate(states):
                if s.w != layout.w:
                    raise ValueError("state lane width does not match the layout")
                v |= s[x, y] << (t * layout.w)
            sub.write_row(lane_row(layout, x, y), v)


def read_states(sub: Subarray, layout: TileLayout, count: int | None = None) -> list[KeccakState]:
    count = layout.tile_count if count is None else count
    mask = (1 << layout.w) - 1
    out = []
    for t in range(count):
        shift = t * layout.w
        lanes = tuple((sub.read_row(lane_row(layout, i % 5, i // 5)) >> shift) & mask
                      for i in range(25))
        out.append(KeccakState(lanes, layout.w))
    return out


def run_stream_on_states(stream: CommandStream, layout_before: TileLayout,
                         layout_after: TileLayout, states: Sequence[KeccakState],
                         cost: CycleCostModel | None = None) -> tuple[list[KeccakState], CycleReport]:
    """Execute ``stream`` on ``states`` (one per tile) and read back through ``layout_after``."""
    sub = new_subarray(layout_before)
    load_states(sub, layout_before, states)
    report = execute(stream, sub, cost)
    return read_states(sub, layout_after, len(states)), report


def simulate_permutation(states: Sequence[KeccakState], rows: int = 32, cols: int = 256,
                         cost: CycleCostModel | None = None):
    """Keccak-f on the subarray; returns (states, report, stream, final layout)."""
    w = states[0].w if states else 64
    layout = build_layout(rows, cols, w)
    start = layout.copy()
    stream = compile_permutation(layout)
    out, report = run_stream_on_states(stream, start, layout, states, cost)
    return out, report, stream, layout


@dataclass
class HashRun:
    digests: list[bytes]
    report: CycleReport
    program: HashProgram
    subarray: Subarray

    @property
    def rows_used(self) -> int:
        return self.program.rows_used


def hash_layout(messages: Sequence[bytes], rows: int | None = None, cols: int = 256) -> TileLayout:
    """Layout with enough message groups for ``messages``; sized automatically when ``rows`` is None."""
    blocks = max(capacity(8 * len(m)).blocks for m in messages)
    groups = blocks - 1
    if rows is None:
        rows = rows_for_layout(groups)
    return build_layout(rows, cols, 64, message_blocks=groups)


def run_program(program: HashProgram, cost: CycleCostModel | None = None) -> HashRun:
    layout = program.layout
    sub = new_subarray(layout)
    for row, v in program.preload.items():
        sub.write_row(row, v)
    report = CycleReport()
    for seg in program.segments:
        report.add(execute(seg, sub, cost))
    digests = []
    for t in range(layout.tile_count):
        shift = t * layout.w
        lanes = [(sub.read_row(r) >> shift) & 0xFFFFFFFFFFFFFFFF for r in program.digest_rows]
        digests.append(b"".join(v.to_bytes(8, "little") for v in lanes))
    return HashRun(digests, report, program, sub)


def simulate_hash(messages: bytes | Sequence[bytes], rows: int | None = None, cols: int = 256,
                  cost: CycleCostModel | None = None) -> HashRun:
    """Hash one message per tile (all with the same padded block count)."""
    if isinstance(messages, (bytes, bytearray)):
        messages = [bytes(messages)]
    layout = hash_layout(messages, rows, cols)
    run = run_program(compile_hash(layout, list(messages)), cost)
    run.digests = run.digests[:len(messages)]
    return run


def hash_batch(messages: Sequence[bytes], cols: int = 256) -> list[bytes]:
    """Simulated digests for many messages, packing same-length-class messages into tiles."""
    tiles = cols // 64
    by_blocks: dict[int, list[int]] = {}
    for i, m in enumerate(messages):
        by_blocks.setdefault(capacity(8 * len(m)).blocks, []).append(i)
    out: list[bytes | None] = [None] * len(messages)
    for idxs in by_blocks.values():
        for start in range(0, len(idxs), tiles):
            chunk = idxs[start:start + tiles]
            run = simulate_hash([messages[i] for i in chunk], cols=cols)
            for i, d in zip(chunk, run.digests):
                out[i] = d
    return out  # type: ignore[return-value]


def reference_digests(messages: Sequence[bytes]) -> list[bytes]:
    return [keccak_ref.sha3_256(m) for m in messages]
