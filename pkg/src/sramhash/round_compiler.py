"""Command-stream generation for the Keccak steps on a lane-per-row layout.

Every ``compile_*`` function reads lane rows through ``layout.perm_map``;
only :func:`compile_pi` changes the map (and emits nothing).  Row usage:

* theta: 20 XORs accumulate the five sheet parities in intermediates 0-4,
  then each combined term ``C[x-1] ^ rot(C[x+1], 1)`` is built in
  intermediate 5 (the last one in place in intermediate 4) and XORed into
  its sheet before the next one is formed.
* chi: plane by plane, intermediates 0-4 hold ``~a[x]`` and then
  ``~a[x] & a[x+1]``; the final XOR writes each lane once.
* iota: the round constant is LOADed into intermediate 0.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import keccak_ref
from .bitcell_array import BitOp, CycleCostModel, Direction
from .isa_controller import (
    Command,
    CommandStream,
    CycleReport,
    audit_dataflow,
    cycle_report,
)
from .layout import RATE_LANES, LayoutError, TileLayout, apply_pi_remap, lane_row


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class StageSchedule:
    stage: str
    commands: CommandStream
    intermediate_live_max: int
    op_counts: Counter = field(compare=False)
    in_place: int = 0

    def cycles(self, cost: CycleCostModel | None = None) -> int:
        return cycle_report(self.commands, cost).total


def _schedule(stage: str, layout: TileLayout, cmds: list[Command]) -> StageSchedule:
    stream = CommandStream.of(cmds, stage)
    audit = audit_dataflow(stream, layout.lane_rows, layout.intermediate_rows,
                           [r for g in layout.message_rows for r in g])
    if not audit.ok:
        raise AssertionError(f"illegal {stage} schedule: {audit.errors[:3]}")
    return StageSchedule(stage, stream, audit.live_max.get(stage, 0),
                         stream.op_counts(), audit.in_place.get(stage, 0))


def _xor(dst: int, a: int, b: int) -> Command:
    return Command.binary(BitOp.XOR, dst, a, b)


def _lanes(layout: TileLayout):
    return lambda x, y: lane_row(layout, x % 5, y % 5)


def compile_theta(layout: TileLayout) -> StageSchedule:
    if len(layout.intermediate_rows) < 6:
        raise LayoutError("theta needs 6 intermediate rows")
    lane = _lanes(layout)
    c = layout.intermediate_rows[:5]
    tmp = layout.intermediate_rows[5]
    cmds: list[Command] = []

    for x in range(5):
        cmds.append(_xor(c[x], lane(x, 0), lane(x, 1)))
        for y in range(2, 5):
            cmds.append(_xor(c[x], c[x], lane(x, y)))

    def fold_into_sheet(x: int, row: int) -> None:
        for y in range(5):
            cmds.append(_xor(lane(x, y), lane(x, y), row))

    # Order chosen so each parity row is dropped right after its last use;
    # the last rotation can then happen in place.
    for x in (0, 2, 4, 1):
        cmds.append(Command.shift(tmp, c[(x + 1) % 5], 1, Direction.LEFT))
        cmds.append(_xor(tmp, tmp, c[(x - 1) % 5]))
        fold_into_sheet(x, tmp)
    cmds.append(Command.shift(c[4], c[4], 1, Direction.LEFT))
    cmds.append(_xor(c[4], c[4], c[2]))
    fold_into_sheet(3, c[4])
    return _schedule("theta", layout, cmds)


def compile_rho(layout: TileLayout, elide_zero: bool = False) -> StageSchedule:
    """One in-place rotation per lane.  Lane (0,0) gets an offset-0 SHIFT
    unless ``elide_zero`` is set."""
    lane = _lanes(layout)
    offsets = keccak_ref.rho_offsets(layout.w)
    cmds = []
    for y in range(5):
        for x in range(5):
            off = offsets[x + 5 * y]
            if off == 0 and elide_zero:
                continue
            row = lane(x, y)
            cmds.append(Command.shift(row, row, off, Direction.LEFT))
    return _schedule("rho", layout, cmds)


def compile_pi(layout: TileLayout) -> StageSchedule:
    apply_pi_remap(layout)
    return _schedule("pi", layout, [])


def compile_chi(layout: TileLayout) -> StageSchedule:
    lane = _lanes(layout)
    tmp = layout.intermediate_rows[:5]
    cmds = []
    for y in range(5):
        for x in range(5):
            cmds.append(Command.unary(tmp[x], lane(x, y)))
        for x in range(5):
            cmds.append(Command.binary(BitOp.AND, tmp[x], tmp[x], lane(x + 1, y)))
        for x in range(5):
            cmds.append(_xor(lane(x, y), lane(x, y), tmp[(x + 1) % 5]))
    return _schedule("chi", layout, cmds)


def compile_iota(layout: TileLayout, round_index: int) -> StageSchedule:
    consts = keccak_ref.round_constants(layout.w)
    if not 0 <= round_index < len(consts):
        raise IndexError(f"round index {round_index} outside 0..{len(consts) - 1}")
    row = lane_row(layout, 0, 0)
    scratch = layout.intermediate_rows[0]
    cmds = [Command.load(scratch, consts[round_index]), _xor(row, row, scratch)]
    return _schedule("iota", layout, cmds)


def compile_round_schedules(layout: TileLayout, round_index: int,
                            elide_zero_rho: bool = False) -> list[StageSchedule]:
    return [
        compile_theta(layout),
        compile_rho(layout, elide_zero_rho),
        compile_pi(layout),
        compile_chi(layout),
        compile_iota(layout, round_index),
    ]


def compile_round(layout: TileLayout, round_index: int,
                  cost: CycleCostModel | None = None,
                  elide_zero_rho: bool = False) -> tuple[CommandStream, CycleReport]:
    parts = compile_round_schedules(layout, round_index, elide_zero_rho)
    stream = CommandStream.concat(p.commands for p in parts)
    return stream, cycle_report(stream, cost)


_PERMUTATION_CACHE: dict[tuple, tuple[CommandStream, list[int]]] = {}


def compile_permutation(layout: TileLayout) -> CommandStream:
    """All rounds of Keccak-f; leaves ``layout.perm_map`` where the last round left it."""
    key = layout.key()
    hit = _PERMUTATION_CACHE.get(key)
    if hit is None:
        work = layout.copy()
        stream = CommandStream.concat(
            compile_round(work, i)[0] for i in range(keccak_ref.num_rounds(layout.w)))
        hit = (stream, list(work.perm_map))
        _PERMUTATION_CACHE[key] = hit
    layout.perm_map[:] = hit[1]
    return hit[0]


def compile_absorb(layout: TileLayout, block_row_group: int) -> StageSchedule:
    """XOR a preloaded 17-row message group into the rate lanes."""
    if not 0 <= block_row_group < len(layout.message_rows):
        raise LayoutError(f"layout has no message row group {block_row_group}")
    group = layout.message_rows[block_row_group]
    cmds = []
    for i in range(RATE_LANES):
        row = lane_row(layout, i % 5, i // 5)
        cmds.append(_xor(row, row, group[i]))
    return _schedule("absorb", layout, cmds)


@dataclass
class HashProgram:
    """Everything needed to hash up to one message per tile on one subarray."""

    layout: TileLayout
    blocks: int
    preload: dict[int, int]
    segments: list[CommandStream]
    digest_rows: tuple[int, ...]

    @property
    def stream(self) -> CommandStream:
        return CommandStream.concat(self.segments)

    @property
    def rows_used(self) -> int:
        """Lane and message rows holding the state and the message (no intermediates)."""
        return len(self.layout.lane_rows) + RATE_LANES * (self.blocks - 1)


def compile_hash(layout: TileLayout, messages: bytes | list[bytes]) -> HashProgram:
    """Pad, place blocks, and emit absorb + permutation per block.

    Several messages run in lockstep, one per tile; they must pad to the same
    number of blocks.  Block 0 is written straight into the rate lanes (the
    state starts at zero); later blocks sit in the layout's message groups.
    """
    if isinstance(messages, (bytes, bytearray)):
        messages = [bytes(messages)]
    if layout.w != 64:
        raise LayoutError("SHA3-256 hashing needs 64-bit lanes")
    if not messages:
        raise ValueError("no messages")
    if len(messages) > layout.tile_count:
        raise CapacityError(f"{len(messages)} messages but only {layout.tile_count} tiles")
    blocks = [keccak_ref.split_blocks(m) for m in messages]
    nblocks = len(blocks[0])
    if any(len(b) != nblocks for b in blocks):
        raise CapacityError("messages sharing a subarray must pad to the same block count")
    if nblocks - 1 > len(layout.message_rows):
        raise CapacityError(
            f"message needs {RATE_LANES * nblocks + 8} state+message rows; layout provides "
            f"{len(layout.lane_rows) + RATE_LANES * len(layout.message_rows)}")

    layout = layout.copy()
    preload: dict[int, int] = {}
    for tile, msg_blocks in enumerate(blocks):
        shift = tile * layout.w
        for b, block in enumerate(msg_blocks):
            lanes = keccak_ref.block_lanes(block)
            for i, v in enumerate(lanes):
                row = lane_row(layout, i % 5, i // 5) if b == 0 else layout.message_rows[b - 1][i]
                preload[row] = preload.get(row, 0) | (v << shift)
    for row in layout.lane_rows:
        preload.setdefault(row, 0)

    segments = [compile_permutation(layout)]
    for g in range(nblocks - 1):
        segments.append(compile_absorb(layout, g).commands)
        segments.append(compile_permutation(layout))
    digest_rows = tuple(lane_row(layout, x, 0) for x in range(4))
    return HashProgram(layout, nblocks, preload, segments, digest_rows)
