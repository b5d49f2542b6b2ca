"""Bit-exact simulator of an in-SRAM SHA-3 engine with lane-per-row data placement."""

from .keccak_ref import KeccakState, keccak_f, sha3_256
from .simulator import simulate_hash, simulate_permutation

__version__ = "0.1.0"

__all__ = ["KeccakState", "keccak_f", "sha3_256", "simulate_hash", "simulate_permutation"]
