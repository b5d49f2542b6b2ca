"""Lane-per-row placement of Keccak states on a subarray.

Each 64-column tile holds one state.  Rows 0-24 hold the 25 lanes (lane
``(x, y)`` starts at row ``x + 5*y``), rows 25-30 are the shared intermediate
pool, and any further rows hold extra 17-lane message blocks.  Lane accesses
go through ``perm_map`` so the pi step only rewrites the map.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import keccak_ref

LANE_ROWS = 25
INTERMEDIATE_ROWS = 6
RATE_LANES = keccak_ref.SHA3_256_RATE_BITS // 64  # 17
MIN_ROWS = LANE_ROWS + INTERMEDIATE_ROWS + 1
MIN_COLS = 64


class LayoutError(ValueError):
    pass


@dataclass
class TileLayout:
    rows: int
    cols: int
    w: int
    lane_rows: tuple[int, ...]
    intermediate_rows: tuple[int, ...]
    message_rows: tuple[tuple[int, ...], ...] = ()
    perm_map: list[int] = field(default_factory=list)

    @property
    def tile_count(self) -> int:
        return self.cols // self.w

    def tile_columns(self, tile: int) -> range:
        if not 0 <= tile < self.tile_count:
            raise IndexError(f"tile {tile} outside 0..{self.tile_count - 1}")
        return range(tile * self.w, (tile + 1) * self.w)

    def copy(self) -> "TileLayout":
        return TileLayout(self.rows, self.cols, self.w, self.lane_rows,
                          self.intermediate_rows, self.message_rows, list(self.perm_map))

    def key(self) -> tuple:
        return (self.rows, self.cols, self.w, self.lane_rows, self.intermediate_rows,
                self.message_rows, tuple(self.perm_map))

    def to_json(self) -> str:
        return json.dumps({
            "rows": self.rows,
            "cols": self.cols,
            "w": self.w,
            "tile_count": self.tile_count,
            "tiles": [[t * self.w, (t + 1) * self.w - 1] for t in range(self.tile_count)],
            "lane_rows": list(self.lane_rows),
            "intermediate_rows": list(self.intermediate_rows),
            "message_rows": [list(g) for g in self.message_rows],
            "perm_map": {f"{i % 5},{i // 5}": r for i, r in enumerate(self.perm_map)},
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TileLayout":
        d = json.loads(text)
        perm = [0] * 25
        for key, row in d["perm_map"].items():
            x, y = (int(v) for v in key.split(","))
            perm[keccak_ref.lane_index(x, y)] = int(row)
        layout = cls(int(d["rows"]), int(d["cols"]), int(d["w"]),
                     tuple(d["lane_rows"]), tuple(d["intermediate_rows"]),
                     tuple(tuple(g) for g in d.get("message_rows", [])), perm)
        validate(layout)
        return layout


def validate(layout: TileLayout) -> None:
    if len(layout.lane_rows) != LANE_ROWS:
        raise LayoutError("need exactly 25 lane rows")
    if len(layout.intermediate_rows) != INTERMEDIATE_ROWS:
        raise LayoutError("need exactly 6 intermediate rows")
    if sorted(layout.perm_map) != sorted(layout.lane_rows):
        raise LayoutError("perm_map is not a bijection onto the lane rows")
    used = list(layout.lane_rows) + list(layout.intermediate_rows)
    for group in layout.message_rows:
        if len(group) != RATE_LANES:
            raise LayoutError(f"message groups hold {RATE_LANES} rows")
        used.extend(group)
    if len(set(used)) != len(used):
        raise LayoutError("row sets overlap")
    if any(not 0 <= r < layout.rows for r in used):
        raise LayoutError("row index outside the subarray")


def build_layout(rows: int, cols: int, w: int = 64, message_blocks: int = 0) -> TileLayout:
    """Identity placement plus ``message_blocks`` extra 17-row block groups."""
    if w not in keccak_ref.LANE_WIDTHS:
        raise LayoutError(f"unsupported lane width {w}")
    if cols < max(w, MIN_COLS) or cols % w:
        raise LayoutError(f"{cols} columns cannot hold whole {w}-bit lanes "
                          f"(minimum {MIN_COLS})")
    needed = rows_for_layout(message_blocks)
    if rows < needed:
        raise LayoutError(f"subarray has {rows} rows, needs at least {needed}")
    lane_rows = tuple(range(LANE_ROWS))
    inter = tuple(range(LANE_ROWS, LANE_ROWS + INTERMEDIATE_ROWS))
    start = LANE_ROWS + INTERMEDIATE_ROWS
    groups = tuple(tuple(range(start + g * RATE_LANES, start + (g + 1) * RATE_LANES))
                   for g in range(message_blocks))
    layout = TileLayout(rows, cols, w, lane_rows, inter, groups, list(lane_rows))
    validate(layout)
    return layout


def rows_for_layout(message_blocks: int = 0) -> int:
    return max(MIN_ROWS, LANE_ROWS + INTERMEDIATE_ROWS + RATE_LANES * message_blocks)


def lane_row(layout: TileLayout, x: int, y: int) -> int:
    if not (0 <= x < 5 and 0 <= y < 5):
        raise IndexError(f"lane ({x}, {y}) outside the 5x5 grid")
    return layout.perm_map[x + 5 * y]


def apply_pi_remap(layout: TileLayout) -> None:
    """Logical lane pi(x, y) now names the row that held logical (x, y)."""
    new = [0] * 25
    for y in range(5):
        for x in range(5):
            tx, ty = keccak_ref.pi_target(x, y)
            new[tx + 5 * ty] = layout.perm_map[x + 5 * y]
    layout.perm_map[:] = new


@dataclass(frozen=True)
class CapacityReport:
    rows_needed: int
    blocks: int
    parallel_messages: int = 1


def padded_blocks(message_bits: int) -> int:
    """Rate blocks after appending the 2 suffix bits and at least 2 pad bits."""
    if message_bits < 0:
        raise ValueError("message length must be >= 0")
    return (message_bits + 4 + keccak_ref.SHA3_256_RATE_BITS - 1) // keccak_ref.SHA3_256_RATE_BITS


def capacity(message_bits: int) -> CapacityReport:
    blocks = padded_blocks(message_bits)
    rows = LANE_ROWS if blocks == 1 else RATE_LANES * blocks + 8
    return CapacityReport(rows_needed=rows, blocks=blocks)


def parallel_messages(banks: int, subarrays_per_2banks: int, cols: int, w: int = 64) -> int:
    if min(banks, subarrays_per_2banks, cols, w) < 1:
        raise ValueError("all arguments must be positive")
    if subarrays_per_2banks < 2:
        raise ValueError("one subarray holds control; need at least 2")
    return banks * (subarrays_per_2banks - 1) * math.ceil(cols / w)


def states_per_tile(rows: int) -> int:
    """Single-block states that fit one tile column when they share one intermediate pool."""
    return max(0, (rows - INTERMEDIATE_ROWS) // LANE_ROWS)
