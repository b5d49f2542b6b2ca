"""Reader and runner for NIST-style hash known-answer files.

The files are blocks of ``Len = <bits>`` / ``Msg = <hex>`` / ``MD = <hex>``
lines; comments (``#``) and section headers (``[L = 256]``) are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

BUNDLED_KATS = ("SHA3_256ShortMsg.rsp", "SHA3_256LongMsg.rsp")


class KatFormatError(ValueError):
    pass


@dataclass(frozen=True)
class KatVector:
    index: int
    length_bits: int
    message: bytes
    digest: bytes

    @property
    def byte_aligned(self) -> bool:
        return self.length_bits % 8 == 0


@dataclass
class KatResult:
    passed: int = 0
    failed: list[int] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed

    def summary(self) -> str:
        return (f"passed={self.passed} failed={len(self.failed)} "
                f"skipped={len(self.skipped)}")


def parse_kat(text: str) -> list[KatVector]:
    vectors: list[KatVector] = []
    current: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("["):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise KatFormatError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = key.strip(), value.strip()
        if key == "Len":
            if current:
                raise KatFormatError(f"line {lineno}: Len before previous vector finished")
            current["Len"] = value
        elif key in ("Msg", "MD"):
            if "Len" not in current:
                raise KatFormatError(f"line {lineno}: {key} without Len")
            current[key] = value
            if "Msg" in current and "MD" in current:
                vectors.append(_make_vector(len(vectors), current, lineno))
                current = {}
        else:
            raise KatFormatError(f"line {lineno}: unknown key {key!r}")
    if current:
        raise KatFormatError("file ends inside a vector")
    return vectors


def _make_vector(index: int, fields: dict[str, str], lineno: int) -> KatVector:
    try:
        length = int(fields["Len"])
        msg = bytes.fromhex(fields["Msg"])
        md = bytes.fromhex(fields["MD"])
    except ValueError as exc:
        raise KatFormatError(f"line {lineno}: {exc}") from None
    if length < 0:
        raise KatFormatError(f"line {lineno}: negative Len")
    nbytes = (length + 7) // 8
    # Len = 0 vectors carry a placeholder "00" message
    if len(msg) < nbytes:
        raise KatFormatError(f"line {lineno}: Msg shorter than Len")
    return KatVector(index, length, msg[:nbytes], md)


def read_kat(path: str | Path) -> list[KatVector]:
    return parse_kat(Path(path).read_text())


def bundled_kat(name: str) -> list[KatVector]:
    return parse_kat(resources.files("sramhash.data").joinpath(name).read_text())


def run_kat(
    vectors: Iterable[KatVector],
    hasher: Callable[[list[bytes]], list[bytes]],
) -> KatResult:
    """Check byte-aligned vectors with ``hasher`` (a batch function); skip the rest.

    ``hasher`` takes a list of messages and returns their digests in order,
    which lets the simulator hash several messages per subarray.
    """
    result = KatResult()
    usable = []
    for v in vectors:
        if v.byte_aligned:
            usable.append(v)
        else:
            result.skipped.append(v.index)
    digests = hasher([v.message for v in usable]) if usable else []
    for v, got in zip(usable, digests):
        if got == v.digest:
            result.passed += 1
        else:
            result.failed.append(v.index)
    return result
