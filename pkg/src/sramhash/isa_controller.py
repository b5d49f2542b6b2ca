"""Controller commands: encoding, control-subarray storage, and execution.

Word layout for ``k`` row-index bits (bit 0 first)::

    [0:1]            opcode  LOAD=00 UNARY=01 SHIFT=10 BINARY=11 (bit0 bit1)
    [2 : 2+k)        result row
    [2+k : 2+2k)     operand row
    [2+2k : 2+2k+m)  second operand row, or shift offset; m = max(k, 6)
    [2+2k+m]         BINARY: 0 XOR / 1 AND;  SHIFT: 0 left / 1 right

For k=8 this is [2:9] [10:17] [18:25] and bit 26.  LOAD words stop after the
result row and carry a 64-bit payload straight after it.

Byte form: each command starts on a byte boundary and is packed
least-significant-bit first.  Non-LOAD commands occupy ``ceil((3+2k+m)/8)``
bytes (4 for k=8).  LOAD packs its ``2+k`` header bits into
``ceil((2+k)/8)`` bytes followed by 8 little-endian payload bytes.  Unused
bits must be zero.

A stream file is ``b"INHL"``, a version byte, the ``k`` byte, then the
commands back to back.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .bitcell_array import BitOp, CycleCostModel, Direction, Subarray

STREAM_MAGIC = b"INHL"
STREAM_VERSION = 1
PAYLOAD_BITS = 64
OFFSET_BITS = 6

STAGES = ("theta", "rho", "pi", "chi", "iota", "absorb")


class EncodingError(ValueError):
    pass


class ControlCapacityError(ValueError):
    def __init__(self, required_rows: int, available_rows: int):
        super().__init__(f"stream needs {required_rows} control rows, "
                         f"only {available_rows} available")
        self.required_rows = required_rows
        self.available_rows = available_rows


class Opcode(enum.Enum):
    LOAD = (0, 0)
    UNARY = (0, 1)
    SHIFT = (1, 0)
    BINARY = (1, 1)


_OPCODE_BY_BITS = {op.value: op for op in Opcode}


@dataclass(frozen=True)
class Command:
    opcode: Opcode
    result_row: int
    operand_row: int | None = None
    operand2: int | None = None
    binary_kind: BitOp | None = None
    direction: Direction | None = None
    rc_payload: int | None = None

    def __post_init__(self) -> None:
        op = self.opcode
        if self.result_row < 0:
            raise EncodingError("negative row index")
        if op is Opcode.LOAD:
            if self.rc_payload is None or not 0 <= self.rc_payload < 1 << PAYLOAD_BITS:
                raise EncodingError("LOAD needs a 64-bit payload")
            extra = (self.operand_row, self.operand2, self.binary_kind, self.direction)
        elif op is Opcode.UNARY:
            if self.operand_row is None or self.operand_row < 0:
                raise EncodingError("UNARY needs an operand row")
            extra = (self.operand2, self.binary_kind, self.direction, self.rc_payload)
        elif op is Opcode.SHIFT:
            if self.operand_row is None or self.operand_row < 0:
                raise EncodingError("SHIFT needs an operand row")
            if self.operand2 is None or not 0 <= self.operand2 < 1 << OFFSET_BITS:
                raise EncodingError(f"shift offset must be in 0..63, got {self.operand2}")
            if self.direction is None:
                raise EncodingError("SHIFT needs a direction")
            extra = (self.binary_kind, self.rc_payload)
        else:
            if self.operand_row is None or self.operand2 is None:
                raise EncodingError("BINARY needs two operand rows")
            if min(self.operand_row, self.operand2) < 0:
                raise EncodingError("negative row index")
            if self.operand_row == self.operand2:
                raise EncodingError("BINARY operand rows must differ")
            if self.binary_kind not in (BitOp.XOR, BitOp.AND):
                raise EncodingError("BINARY kind must be XOR or AND")
            extra = (self.direction, self.rc_payload)
        if any(v is not None for v in extra):
            raise EncodingError(f"field not used by {op.name} is set")

    @classmethod
    def load(cls, result_row: int, payload: int) -> "Command":
        return cls(Opcode.LOAD, result_row, rc_payload=payload)

    @classmethod
    def unary(cls, result_row: int, operand_row: int) -> "Command":
        return cls(Opcode.UNARY, result_row, operand_row)

    @classmethod
    def shift(cls, result_row: int, operand_row: int, offset: int,
              direction: Direction = Direction.LEFT) -> "Command":
        return cls(Opcode.SHIFT, result_row, operand_row, offset, direction=direction)

    @classmethod
    def binary(cls, kind: BitOp, result_row: int, a: int, b: int) -> "Command":
        return cls(Opcode.BINARY, result_row, a, b, binary_kind=kind)

    @property
    def source_rows(self) -> tuple[int, ...]:
        if self.opcode is Opcode.LOAD:
            return ()
        if self.opcode is Opcode.BINARY:
            return (self.operand_row, self.operand2)
        return (self.operand_row,)

    @property
    def in_place(self) -> bool:
        return self.result_row in self.source_rows

    @property
    def mnemonic(self) -> str:
        if self.opcode is Opcode.BINARY:
            return self.binary_kind.value
        if self.opcode is Opcode.UNARY:
            return "NOT"
        return self.opcode.name


# -- bit-level encoding ----------------------------------------------------------

def row_index_bits(rows: int) -> int:
    return max(1, math.ceil(math.log2(rows)))


def _field_widths(k: int) -> tuple[int, int]:
    if k < 1:
        raise EncodingError("row index width must be positive")
    return k, max(k, OFFSET_BITS)


def word_bits(k: int) -> int:
    """Length of a non-LOAD command word."""
    k, m = _field_widths(k)
    return 3 + 2 * k + m


def _put(bits: list[str], start: int, width: int, value: int, name: str) -> None:
    if not 0 <= value < 1 << width:
        raise EncodingError(f"{name}={value} overflows a {width}-bit field")
    for i in range(width):
        bits[start + i] = "1" if value >> i & 1 else "0"


def _get(bits: str, start: int, width: int) -> int:
    return sum(1 << i for i in range(width) if bits[start + i] == "1")


def encode(cmd: Command, k: int) -> str:
    """Bit string of ``cmd``; character ``i`` is bit ``i``."""
    k, m = _field_widths(k)
    op = cmd.opcode
    if op is Opcode.LOAD:
        bits = ["0"] * (2 + k + PAYLOAD_BITS)
    else:
        bits = ["0"] * word_bits(k)
    bits[0], bits[1] = (str(b) for b in op.value)
    _put(bits, 2, k, cmd.result_row, "result_row")
    if op is Opcode.LOAD:
        _put(bits, 2 + k, PAYLOAD_BITS, cmd.rc_payload, "rc_payload")
        return "".join(bits)
    _put(bits, 2 + k, k, cmd.operand_row, "operand_row")
    if op is Opcode.SHIFT:
        _put(bits, 2 + 2 * k, m, cmd.operand2, "offset")
        bits[2 + 2 * k + m] = "1" if cmd.direction is Direction.RIGHT else "0"
    elif op is Opcode.BINARY:
        _put(bits, 2 + 2 * k, m, cmd.operand2, "operand2")
        bits[2 + 2 * k + m] = "1" if cmd.binary_kind is BitOp.AND else "0"
    return "".join(bits)


def decode(bits: str, k: int) -> Command:
    k, m = _field_widths(k)
    if len(bits) < 2 or set(bits) - {"0", "1"}:
        raise EncodingError("not a bit string")
    op = _OPCODE_BY_BITS[(int(bits[0]), int(bits[1]))]
    if op is Opcode.LOAD:
        if len(bits) < 2 + k + PAYLOAD_BITS:
            raise EncodingError("LOAD word truncated (missing payload)")
        if len(bits) > 2 + k + PAYLOAD_BITS:
            raise EncodingError("trailing bits after LOAD payload")
        return Command.load(_get(bits, 2, k), _get(bits, 2 + k, PAYLOAD_BITS))
    n = word_bits(k)
    if len(bits) < n:
        raise EncodingError("command word truncated")
    if "1" in bits[n:]:
        raise EncodingError("nonzero padding bits")
    result, a = _get(bits, 2, k), _get(bits, 2 + k, k)
    second, flag = _get(bits, 2 + 2 * k, m), bits[2 + 2 * k + m] == "1"
    if op is Opcode.UNARY:
        if second or flag:
            raise EncodingError("UNARY word has nonzero unused fields")
        return Command.unary(result, a)
    if op is Opcode.SHIFT:
        if second >= 1 << OFFSET_BITS:
            raise EncodingError("shift offset field out of range")
        return Command.shift(result, a, second, Direction.RIGHT if flag else Direction.LEFT)
    return Command.binary(BitOp.AND if flag else BitOp.XOR, result, a, second)


def _bits_to_bytes(bits: str) -> bytes:
    n = (len(bits) + 7) // 8
    return _get(bits.ljust(8 * n, "0"), 0, 8 * n).to_bytes(n, "little")


def command_to_bytes(cmd: Command, k: int) -> bytes:
    bits = encode(cmd, k)
    if cmd.opcode is Opcode.LOAD:
        return _bits_to_bytes(bits[:2 + k]) + cmd.rc_payload.to_bytes(8, "little")
    return _bits_to_bytes(bits)


def _load_header_bytes(k: int) -> int:
    return (2 + k + 7) // 8


def iter_decode_bytes(data: bytes, k: int) -> Iterator[tuple[Command, int]]:
    """Yield ``(command, length_in_bytes)`` for a packed byte stream."""
    word_len = (word_bits(k) + 7) // 8
    hdr_len = _load_header_bytes(k)
    pos = 0
    while pos < len(data):
        opbits = (data[pos] & 1, data[pos] >> 1 & 1)
        if _OPCODE_BY_BITS[opbits] is Opcode.LOAD:
            size = hdr_len + 8
            if pos + size > len(data):
                raise EncodingError(f"LOAD at byte {pos} truncated (missing payload)")
            header = int.from_bytes(data[pos:pos + hdr_len], "little")
            if header >> (2 + k):
                raise EncodingError(f"nonzero padding in LOAD header at byte {pos}")
            payload = int.from_bytes(data[pos + hdr_len:pos + size], "little")
            yield Command.load(header >> 2, payload), size
        else:
            size = word_len
            if pos + size > len(data):
                raise EncodingError(f"command at byte {pos} truncated")
            word = int.from_bytes(data[pos:pos + size], "little")
            bits = "".join("1" if word >> i & 1 else "0" for i in range(8 * size))
            yield decode(bits, k), size
        pos += size


def encode_stream_bytes(commands: Iterable[Command], k: int) -> bytes:
    return b"".join(command_to_bytes(c, k) for c in commands)


def decode_stream_bytes(data: bytes, k: int) -> list[Command]:
    return [c for c, _ in iter_decode_bytes(data, k)]


# -- streams -------------------------------------------------------------------------

@dataclass(frozen=True)
class CommandStream:
    commands: tuple[Command, ...] = ()
    stages: tuple[str, ...] = ()
    _lowered: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        if len(self.stages) != len(self.commands):
            raise ValueError("one stage tag per command")

    @classmethod
    def of(cls, commands: Iterable[Command], stage: str) -> "CommandStream":
        cmds = tuple(commands)
        return cls(cmds, (stage,) * len(cmds))

    def __len__(self) -> int:
        return len(self.commands)

    def __iter__(self) -> Iterator[Command]:
        return iter(self.commands)

    def __add__(self, other: "CommandStream") -> "CommandStream":
        return CommandStream(self.commands + other.commands, self.stages + other.stages)

    @classmethod
    def concat(cls, parts: Iterable["CommandStream"]) -> "CommandStream":
        cmds: list[Command] = []
        stages: list[str] = []
        for p in parts:
            cmds.extend(p.commands)
            stages.extend(p.stages)
        return cls(tuple(cmds), tuple(stages))

    def max_row(self) -> int:
        rows = [c.result_row for c in self.commands]
        rows += [r for c in self.commands for r in c.source_rows]
        return max(rows, default=-1)

    def to_bytes(self, k: int) -> bytes:
        return encode_stream_bytes(self.commands, k)

    def op_counts(self) -> Counter:
        return Counter(c.mnemonic for c in self.commands)


def write_stream_file(path: str | Path, stream: CommandStream, k: int) -> None:
    Path(path).write_bytes(STREAM_MAGIC + bytes([STREAM_VERSION, k]) + stream.to_bytes(k))


def read_stream_file(path: str | Path) -> tuple[CommandStream, int]:
    """Stage tags are not stored in the binary form; decoded commands are tagged ``""``."""
    return parse_stream_file(Path(path).read_bytes())


def parse_stream_file(data: bytes) -> tuple[CommandStream, int]:
    if len(data) < 6 or data[:4] != STREAM_MAGIC:
        raise EncodingError("not a command-stream file (bad magic)")
    if data[4] != STREAM_VERSION:
        raise EncodingError(f"unsupported stream version {data[4]}")
    k = data[5]
    return CommandStream.of(decode_stream_bytes(data[6:], k), ""), k


# -- control subarray ------------------------------------------------------------------

@dataclass(frozen=True)
class ControlImage:
    rows: tuple[int, ...]
    cols: int
    k: int
    nbytes: int
    fetch: tuple[tuple[int, int, int], ...]  # (row, byte offset in row, length)

    @property
    def row_bytes(self) -> int:
        return self.cols // 8

    def raw(self) -> bytes:
        n = self.row_bytes
        return b"".join(r.to_bytes(n, "little") for r in self.rows)[:self.nbytes]


def store_control(stream: CommandStream, k: int, cols: int = 256,
                  capacity_rows: int | None = None) -> ControlImage:
    """Pack the serialized stream row-major into control-subarray rows."""
    if cols % 8:
        raise ValueError("control rows must be whole bytes")
    row_bytes = cols // 8
    data = bytearray()
    fetch = []
    for cmd in stream:
        blob = command_to_bytes(cmd, k)
        fetch.append((len(data) // row_bytes, len(data) % row_bytes, len(blob)))
        data += blob
    required = -(-len(data) // row_bytes)
    if capacity_rows is not None and required > capacity_rows:
        raise ControlCapacityError(required, capacity_rows)
    nbytes = len(data)
    data += bytes(required * row_bytes - nbytes)
    rows = tuple(int.from_bytes(data[i * row_bytes:(i + 1) * row_bytes], "little")
                 for i in range(required))
    return ControlImage(rows, cols, k, nbytes, tuple(fetch))


def load_control(image: ControlImage) -> CommandStream:
    """Fetch commands back out of a control image in schedule order."""
    return CommandStream.of(decode_stream_bytes(image.raw(), image.k), "")


def control_image_to_subarray(image: ControlImage, rows: int) -> Subarray:
    sub = Subarray(max(rows, len(image.rows)), image.cols, check_minimums=False)
    for i, v in enumerate(image.rows):
        sub.write_row(i, v)
    return sub


# -- execution --------------------------------------------------------------------------

@dataclass
class CycleReport:
    stage_cycles: dict[str, int] = field(default_factory=lambda: dict.fromkeys(STAGES, 0))
    op_counts: Counter = field(default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.stage_cycles.values())

    @property
    def round_cycles(self) -> int:
        """Everything except block absorption."""
        return self.total - self.stage_cycles.get("absorb", 0)

    def add(self, other: "CycleReport") -> None:
        for s, c in other.stage_cycles.items():
            self.stage_cycles[s] = self.stage_cycles.get(s, 0) + c
        self.op_counts.update(other.op_counts)

    def scaled(self, times: int) -> "CycleReport":
        return CycleReport({s: c * times for s, c in self.stage_cycles.items()},
                           Counter({k: v * times for k, v in self.op_counts.items()}))

    def as_dict(self) -> dict:
        return {"stages": dict(self.stage_cycles), "total": self.total,
                "op_counts": dict(self.op_counts)}


def command_cycles(cmd: Command, cost: CycleCostModel) -> int:
    if cmd.opcode is Opcode.LOAD:
        return cost.load_cycles
    if cmd.opcode is Opcode.SHIFT:
        return cost.shift_cycles
    return cost.logic_op_cycles


def cycle_report(stream: CommandStream, cost: CycleCostModel | None = None) -> CycleReport:
    """Static cycle accounting; execution charges exactly this."""
    cost = cost or CycleCostModel()
    key = ("report", cost)
    cached = stream._lowered.get(key)
    if cached is None:
        cached = CycleReport()
        for cmd, stage in zip(stream.commands, stream.stages):
            cached.stage_cycles[stage] = cached.stage_cycles.get(stage, 0) + command_cycles(cmd, cost)
            cached.op_counts[cmd.mnemonic] += 1
        stream._lowered[key] = cached
    return CycleReport(dict(cached.stage_cycles), Counter(cached.op_counts))


_LOAD, _NOT, _SHIFT, _XOR, _AND = range(5)


def _replicate(payload: int, width: int, cols: int) -> int:
    payload &= (1 << width) - 1
    out = 0
    for s in range(cols // width):
        out |= payload << (s * width)
    return out


def _lower(stream: CommandStream, sub: Subarray) -> list[tuple[int, int, int, int]]:
    key = ("lowered", sub.cols, sub.shifter_width)
    ops = stream._lowered.get(key)
    if ops is not None:
        return ops
    width = sub.shifter_width
    ops = []
    for c in stream.commands:
        if c.opcode is Opcode.LOAD:
            ops.append((_LOAD, c.result_row, _replicate(c.rc_payload, width, sub.cols), 0))
        elif c.opcode is Opcode.UNARY:
            ops.append((_NOT, c.result_row, c.operand_row, 0))
        elif c.opcode is Opcode.SHIFT:
            if c.operand2 >= width:
                raise ValueError(f"shift offset {c.operand2} exceeds the "
                                 f"{width}-bit shifter")
            left = c.operand2 if c.direction is Direction.LEFT else (width - c.operand2) % width
            ops.append((_SHIFT, c.result_row, c.operand_row, left))
        elif c.binary_kind is BitOp.XOR:
            ops.append((_XOR, c.result_row, c.operand_row, c.operand2))
        else:
            ops.append((_AND, c.result_row, c.operand_row, c.operand2))
    stream._lowered[key] = ops
    return ops


def execute(stream: CommandStream, sub: Subarray,
            cost: CycleCostModel | None = None) -> CycleReport:
    """Apply every command to all tiles of ``sub`` at once; return the cycles charged."""
    if stream.max_row() >= sub.rows:
        raise IndexError(f"stream addresses row {stream.max_row()}, "
                         f"subarray has {sub.rows}")
    ops = _lower(stream, sub)
    cells = sub.cells
    full = sub.col_mask
    width = sub.shifter_width
    masks = sub._rot_masks
    for code, dst, a, b in ops:
        if code == _XOR:
            cells[dst] = cells[a] ^ cells[b]
        elif code == _SHIFT:
            v = cells[a]
            if b:
                hi, lo = masks[b]
                v = ((v << b) & hi) | ((v >> (width - b)) & lo)
            cells[dst] = v
        elif code == _NOT:
            cells[dst] = ~cells[a] & full
        elif code == _AND:
            cells[dst] = cells[a] & cells[b]
        else:
            cells[dst] = a
    return cycle_report(stream, cost)


def execute_checked(stream: CommandStream, sub: Subarray,
                    cost: CycleCostModel | None = None) -> CycleReport:
    """Slow path through the public subarray primitives, one command at a time."""
    for c in stream:
        if c.opcode is Opcode.LOAD:
            sub.write_row(c.result_row, _replicate(c.rc_payload, sub.shifter_width, sub.cols))
        elif c.opcode is Opcode.UNARY:
            sub.write_row(c.result_row, sub.bitline_op(BitOp.NOT, c.operand_row))
        elif c.opcode is Opcode.SHIFT:
            sub.rotate_segmented(c.operand_row, c.result_row, c.operand2, c.direction)
        else:
            sub.write_row(c.result_row, sub.bitline_op(c.binary_kind, c.operand_row, c.operand2))
    return cycle_report(stream, cost)


# -- trace and audit ----------------------------------------------------------------------

def trace_lines(stream: CommandStream, cost: CycleCostModel | None = None) -> Iterator[str]:
    """``cycle_start opcode result op1 op2/off stage``, one line per command."""
    cost = cost or CycleCostModel()
    cycle = 0
    for cmd, stage in zip(stream.commands, stream.stages):
        if cmd.opcode is Opcode.LOAD:
            op1, op2 = "-", f"0x{cmd.rc_payload:016x}"
        elif cmd.opcode is Opcode.UNARY:
            op1, op2 = str(cmd.operand_row), "-"
        elif cmd.opcode is Opcode.SHIFT:
            op1 = str(cmd.operand_row)
            op2 = ("L" if cmd.direction is Direction.LEFT else "R") + str(cmd.operand2)
        else:
            op1, op2 = str(cmd.operand_row), str(cmd.operand2)
        yield f"{cycle} {cmd.mnemonic} {cmd.result_row} {op1} {op2} {stage or '-'}"
        cycle += command_cycles(cmd, cost)


@dataclass
class AuditReport:
    errors: list[str] = field(default_factory=list)
    live_max: dict[str, int] = field(default_factory=dict)
    in_place: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors


def audit_dataflow(stream: CommandStream, lane_rows: Iterable[int],
                   intermediate_rows: Iterable[int],
                   message_rows: Iterable[int] = ()) -> AuditReport:
    """Check schedule legality segment by segment (a segment is a run of one stage tag).

    * every source row holds a defined value: lane and message rows always
      do, intermediate rows only after a write earlier in the same segment;
    * a lane row is never read after it was overwritten within the segment
      (the original value must be fully consumed first);
    * message rows are never written.

    Also reports, per stage, the peak number of intermediate rows holding a
    value that is still going to be read, and the number of in-place writes.
    """
    lanes = set(lane_rows)
    inter = set(intermediate_rows)
    msgs = set(message_rows)
    report = AuditReport()
    cmds, tags = stream.commands, stream.stages
    start = 0
    while start < len(cmds):
        end = start
        while end < len(cmds) and tags[end] == tags[start]:
            end += 1
        _audit_segment(cmds[start:end], start, tags[start], lanes, inter, msgs, report)
        start = end
    return report


def _audit_segment(cmds, base, stage, lanes, inter, msgs, report) -> None:
    defined: set[int] = set()
    overwritten: set[int] = set()
    for i, c in enumerate(cmds):
        where = f"{stage}[{base + i}] {c.mnemonic}"
        for r in c.source_rows:
            if r in inter and r not in defined:
                report.errors.append(f"{where}: reads intermediate row {r} before writing it")
            elif r in overwritten:
                report.errors.append(f"{where}: reads lane row {r} after overwriting it")
            elif r not in inter and r not in lanes and r not in msgs:
                report.errors.append(f"{where}: reads uninitialized row {r}")
        dst = c.result_row
        if dst in msgs:
            report.errors.append(f"{where}: writes message row {dst}")
        if dst in inter:
            defined.add(dst)
        elif dst in lanes:
            overwritten.add(dst)
        else:
            report.errors.append(f"{where}: writes row {dst} outside the layout")

    # a value written to an intermediate row occupies it until its last read
    occupied: list[set[int]] = [set() for _ in cmds]
    for i, c in enumerate(cmds):
        r = c.result_row
        if r not in inter:
            continue
        last = i
        for j in range(i + 1, len(cmds)):
            if r in cmds[j].source_rows:
                last = j
            if cmds[j].result_row == r:
                break
        for j in range(i, last + 1):
            occupied[j].add(r)
    live_max = max((len(o) for o in occupied), default=0)
    report.live_max[stage] = max(report.live_max.get(stage, 0), live_max)
    report.in_place[stage] = report.in_place.get(stage, 0) + sum(c.in_place for c in cmds)
