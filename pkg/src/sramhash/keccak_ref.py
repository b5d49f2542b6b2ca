"""Golden software Keccak-f and SHA3-256.

Everything the simulator produces is checked against the functions in this
module.  States are immutable; every step returns a new :class:`KeccakState`.

Lanes are stored flat at index ``x + 5*y`` and bit ``z`` of a lane is bit
``z`` of the integer (FIPS 202 little-endian lane convention).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

LANE_WIDTHS = (1, 2, 4, 8, 16, 32, 64)

SHA3_256_RATE_BITS = 1088
SHA3_256_RATE_BYTES = SHA3_256_RATE_BITS // 8
SHA3_256_DIGEST_BYTES = 32

# Frozen w=64 tables.  tests/test_keccak_ref.py regenerates both from their
# definitions and compares.
ROUND_CONSTANTS_64 = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)

# indexed x + 5*y
RHO_OFFSETS_64 = (
    0, 1, 62, 28, 27,
    36, 44, 6, 55, 20,
    3, 10, 43, 25, 39,
    41, 45, 15, 21, 8,
    18, 2, 61, 56, 14,
)


def lane_index(x: int, y: int) -> int:
    return (x % 5) + 5 * (y % 5)


def num_rounds(w: int) -> int:
    """12 + 2*log2(w)."""
    _check_width(w)
    return 12 + 2 * (w.bit_length() - 1)


def _check_width(w: int) -> None:
    if w not in LANE_WIDTHS:
        raise ValueError(f"lane width must be one of {LANE_WIDTHS}, got {w}")


def rotl(value: int, offset: int, w: int) -> int:
    offset %= w
    mask = (1 << w) - 1
    return ((value << offset) | (value >> (w - offset))) & mask


@dataclass(frozen=True)
class KeccakState:
    lanes: tuple[int, ...]
    w: int = 64

    def __post_init__(self) -> None:
        _check_width(self.w)
        if len(self.lanes) != 25:
            raise ValueError(f"a state has 25 lanes, got {len(self.lanes)}")
        limit = 1 << self.w
        for v in self.lanes:
            if not 0 <= v < limit:
                raise ValueError(f"lane value {v:#x} does not fit in {self.w} bits")

    @property
    def b(self) -> int:
        return 25 * self.w

    def __getitem__(self, xy: tuple[int, int]) -> int:
        x, y = xy
        return self.lanes[lane_index(x, y)]

    def with_lane(self, x: int, y: int, value: int) -> "KeccakState":
        lanes = list(self.lanes)
        lanes[lane_index(x, y)] = value
        return KeccakState(tuple(lanes), self.w)

    def __xor__(self, other: "KeccakState") -> "KeccakState":
        if other.w != self.w:
            raise ValueError("lane widths differ")
        return KeccakState(tuple(a ^ b for a, b in zip(self.lanes, other.lanes)), self.w)

    @classmethod
    def zeros(cls, w: int = 64) -> "KeccakState":
        return cls((0,) * 25, w)

    @classmethod
    def random(cls, rng: random.Random, w: int = 64) -> "KeccakState":
        return cls(tuple(rng.getrandbits(w) for _ in range(25)), w)

    @classmethod
    def from_bytes(cls, data: bytes, w: int = 64) -> "KeccakState":
        """FIPS 202 string-to-state: byte 0 lands in the low bits of lane (0,0)."""
        if w < 8:
            raise ValueError("byte conversion needs lanes of at least 8 bits")
        nbytes = w // 8
        if len(data) != 25 * nbytes:
            raise ValueError(f"expected {25 * nbytes} bytes, got {len(data)}")
        lanes = tuple(
            int.from_bytes(data[i * nbytes:(i + 1) * nbytes], "little") for i in range(25)
        )
        return cls(lanes, w)

    def to_bytes(self) -> bytes:
        if self.w < 8:
            raise ValueError("byte conversion needs lanes of at least 8 bits")
        nbytes = self.w // 8
        return b"".join(v.to_bytes(nbytes, "little") for v in self.lanes)


# -- constants ---------------------------------------------------------------

def rc_bit(t: int) -> int:
    """Output bit ``rc(t)`` of the degree-8 LFSR that generates round constants."""
    if t % 255 == 0:
        return 1
    r = [1, 0, 0, 0, 0, 0, 0, 0]
    for _ in range(t % 255):
        r = [0] + r
        r[0] ^= r[8]
        r[4] ^= r[8]
        r[5] ^= r[8]
        r[6] ^= r[8]
        r = r[:8]
    return r[0]


@lru_cache(maxsize=None)
def round_constants(w: int = 64) -> tuple[int, ...]:
    """Regenerate RC[0..n_rounds) from the LFSR for lane width ``w``."""
    l = w.bit_length() - 1
    consts = []
    for ir in range(num_rounds(w)):
        rc = 0
        for j in range(l + 1):
            rc |= rc_bit(j + 7 * ir) << ((1 << j) - 1)
        consts.append(rc)
    return tuple(consts)


@lru_cache(maxsize=None)
def rho_offsets(w: int = 64) -> tuple[int, ...]:
    """Rotation offsets from the (x, y) -> (y, 2x+3y) walk, reduced mod ``w``."""
    _check_width(w)
    r = [0] * 25
    x, y = 1, 0
    for t in range(24):
        r[lane_index(x, y)] = ((t + 1) * (t + 2) // 2) % w
        x, y = y, (2 * x + 3 * y) % 5
    return tuple(r)


def pi_target(x: int, y: int) -> tuple[int, int]:
    """Where lane (x, y) goes under pi."""
    return y % 5, (2 * x + 3 * y) % 5


# -- step mappings -------------------------------------------------------------

def theta(state: KeccakState) -> KeccakState:
    w, a = state.w, state.lanes
    c = [a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20] for x in range(5)]
    d = [c[(x - 1) % 5] ^ rotl(c[(x + 1) % 5], 1, w) for x in range(5)]
    return KeccakState(tuple(a[i] ^ d[i % 5] for i in range(25)), w)


def rho(state: KeccakState) -> KeccakState:
    w = state.w
    offs = rho_offsets(w)
    return KeccakState(tuple(rotl(v, offs[i], w) for i, v in enumerate(state.lanes)), w)


def pi(state: KeccakState) -> KeccakState:
    out = [0] * 25
    for y in range(5):
        for x in range(5):
            out[lane_index(*pi_target(x, y))] = state.lanes[lane_index(x, y)]
    return KeccakState(tuple(out), state.w)


def chi(state: KeccakState) -> KeccakState:
    w, b = state.w, state.lanes
    mask = (1 << w) - 1
    out = [0] * 25
    for y in range(5):
        row = b[5 * y:5 * y + 5]
        for x in range(5):
            out[x + 5 * y] = row[x] ^ (~row[(x + 1) % 5] & mask & row[(x + 2) % 5])
    return KeccakState(tuple(out), w)


def iota(state: KeccakState, round_index: int) -> KeccakState:
    consts = round_constants(state.w)
    if not 0 <= round_index < len(consts):
        raise IndexError(f"round index {round_index} outside 0..{len(consts) - 1}")
    return state.with_lane(0, 0, state[0, 0] ^ consts[round_index])


def keccak_round(state: KeccakState, round_index: int) -> KeccakState:
    return iota(chi(pi(rho(theta(state)))), round_index)


def keccak_f(state: KeccakState) -> KeccakState:
    for i in range(num_rounds(state.w)):
        state = keccak_round(state, i)
    return state


# -- sponge --------------------------------------------------------------------

def pad_sha3(message: bytes, rate_bytes: int = SHA3_256_RATE_BYTES) -> bytes:
    """Append the SHA-3 domain suffix and pad10*1 up to a multiple of the rate."""
    q = rate_bytes - len(message) % rate_bytes
    if q == 1:
        return message + b"\x86"
    return message + b"\x06" + b"\x00" * (q - 2) + b"\x80"


def split_blocks(message: bytes) -> list[bytes]:
    padded = pad_sha3(message)
    return [padded[i:i + SHA3_256_RATE_BYTES]
            for i in range(0, len(padded), SHA3_256_RATE_BYTES)]


def block_lanes(block: bytes) -> tuple[int, ...]:
    """The 17 rate lanes carried by one 136-byte block."""
    return tuple(int.from_bytes(block[8 * i:8 * i + 8], "little")
                 for i in range(SHA3_256_RATE_BYTES // 8))


def absorb_block(state: KeccakState, block: bytes) -> KeccakState:
    lanes = list(state.lanes)
    for i, v in enumerate(block_lanes(block)):
        lanes[i] ^= v
    return KeccakState(tuple(lanes), state.w)


def digest_from_state(state: KeccakState) -> bytes:
    return state.to_bytes()[:SHA3_256_DIGEST_BYTES]


def sha3_256(message: bytes) -> bytes:
    state = KeccakState.zeros(64)
    for block in split_blocks(bytes(message)):
        state = keccak_f(absorb_block(state, block))
    return digest_from_state(state)
