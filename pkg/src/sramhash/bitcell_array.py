"""Functional model of one compute-capable SRAM subarray.

A row is held as a Python int whose bit ``j`` is the cell in column ``j``.
Bitline operations activate one or two rows and return the sensed column
vector without writing anything back; pairing a result with a destination row
is the controller's job.  The read path has one ``shifter_width``-bit barrel
shifter per column segment, all driven with the same offset.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

MIN_ROWS = 32
MIN_COLS = 64


class BitOp(enum.Enum):
    AND = "AND"
    NOR = "NOR"
    XOR = "XOR"
    NOT = "NOT"


class Direction(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class CycleCostModel:
    """Cycles charged per command class.

    ``logic_op_cycles`` covers the three-access bitline XOR plus write-back.
    ``load_cycles`` is 0 because round-constant delivery overlaps the command
    broadcast.
    """

    logic_op_cycles: int = 4
    shift_cycles: int = 2
    load_cycles: int = 0

    def __post_init__(self) -> None:
        for name in ("logic_op_cycles", "shift_cycles", "load_cycles"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def segment_masks(cols: int, width: int, offset: int) -> tuple[int, int]:
    """Masks selecting bits ``[offset, width)`` and ``[0, offset)`` of every segment."""
    high = ((1 << width) - 1) ^ ((1 << offset) - 1)
    low = (1 << offset) - 1
    hi_mask = lo_mask = 0
    for s in range(cols // width):
        hi_mask |= high << (s * width)
        lo_mask |= low << (s * width)
    return hi_mask, lo_mask


class Subarray:
    def __init__(self, rows: int, cols: int, shifter_width: int = 64,
                 check_minimums: bool = True):
        if check_minimums and (rows < MIN_ROWS or cols < MIN_COLS):
            raise ValueError(
                f"subarray must be at least {MIN_ROWS}x{MIN_COLS}, got {rows}x{cols}")
        if rows < 1 or cols < 1 or shifter_width < 1:
            raise ValueError("dimensions must be positive")
        if cols % shifter_width:
            raise ValueError(f"{cols} columns is not a multiple of the "
                             f"{shifter_width}-bit shifter width")
        self.rows = rows
        self.cols = cols
        self.shifter_width = shifter_width
        self.col_mask = (1 << cols) - 1
        self.cells = [0] * rows
        # index by offset; LEFT rotation by k uses _rot_masks[k]
        self._rot_masks = [segment_masks(cols, shifter_width, k)
                           for k in range(shifter_width)]

    def copy(self) -> "Subarray":
        other = Subarray.__new__(Subarray)
        other.__dict__.update(self.__dict__)
        other.cells = list(self.cells)
        return other

    def _check_row(self, row: int) -> None:
        if not 0 <= row < self.rows:
            raise IndexError(f"row {row} outside 0..{self.rows - 1}")

    def write_row(self, row: int, data: int | Sequence[int] | np.ndarray) -> None:
        """Replace a row.  ``data`` is an int bit-vector or a sequence of C bits."""
        self._check_row(row)
        if isinstance(data, (int, np.integer)):
            value = int(data)
            if not 0 <= value <= self.col_mask:
                raise ValueError(f"value does not fit in {self.cols} columns")
        else:
            bits = np.asarray(data, dtype=np.uint8).ravel()
            if bits.size != self.cols:
                raise ValueError(f"expected {self.cols} bits, got {bits.size}")
            if np.any(bits > 1):
                raise ValueError("bit vector entries must be 0 or 1")
            value = bits_to_int(bits)
        self.cells[row] = value

    def read_row(self, row: int) -> int:
        self._check_row(row)
        return self.cells[row]

    def read_bits(self, row: int) -> np.ndarray:
        return int_to_bits(self.read_row(row), self.cols)

    def bitline_op(self, kind: BitOp, row_a: int, row_b: int | None = None) -> int:
        self._check_row(row_a)
        if kind is BitOp.NOT:
            if row_b is not None:
                raise ValueError("NOT activates a single row")
            # single-row NOR: the complement bitline senses ~a
            return ~self.cells[row_a] & self.col_mask
        if row_b is None:
            raise ValueError(f"{kind.value} needs two rows")
        self._check_row(row_b)
        if row_a == row_b:
            raise ValueError("two-row activation needs two distinct rows")
        a, b = self.cells[row_a], self.cells[row_b]
        if kind is BitOp.AND:
            return a & b
        if kind is BitOp.NOR:
            return ~(a | b) & self.col_mask
        if kind is BitOp.XOR:
            return a ^ b
        raise ValueError(f"unknown bitline op {kind!r}")

    def rotate_segmented(self, src_row: int, dst_row: int, offset: int,
                         direction: Direction = Direction.LEFT) -> None:
        self._check_row(src_row)
        self._check_row(dst_row)
        if not 0 <= offset < self.shifter_width:
            raise ValueError(f"offset {offset} outside 0..{self.shifter_width - 1}")
        self.cells[dst_row] = self.rotated(self.cells[src_row], offset, direction)

    def rotated(self, value: int, offset: int, direction: Direction = Direction.LEFT) -> int:
        if direction is Direction.RIGHT:
            offset = (self.shifter_width - offset) % self.shifter_width
        if offset == 0:
            return value
        hi, lo = self._rot_masks[offset]
        return ((value << offset) & hi) | ((value >> (self.shifter_width - offset)) & lo)

    def dump_hex(self) -> str:
        """One line per row, most significant column first."""
        width = (self.cols + 3) // 4
        return "\n".join(f"{v:0{width}x}" for v in self.cells) + "\n"

    @classmethod
    def load_hex(cls, text: str, cols: int, shifter_width: int = 64) -> "Subarray":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        sub = cls(len(lines), cols, shifter_width, check_minimums=False)
        for i, ln in enumerate(lines):
            sub.write_row(i, int(ln, 16))
        return sub


def bits_to_int(bits: np.ndarray) -> int:
    packed = np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def int_to_bits(value: int, n: int) -> np.ndarray:
    raw = np.frombuffer(value.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n]
