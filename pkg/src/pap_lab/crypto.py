"""Deterministic cryptographic and EPC-style primitives.

All state is explicit: the nonce generator is a SplitMix64 stream carried in
an immutable RngState, so any draw sequence can be replayed from its seed.
The authentication hash is pluggable; the reference instantiation is
FNV-1a-64 over the 16-byte big-endian concatenation nonce||key.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import kernels

MASK16 = 0xFFFF
MASK32 = 0xFFFFFFFF
MASK64 = 0xFFFFFFFFFFFFFFFF
MASK96 = (1 << 96) - 1

HashFn = Callable[[bytes], int]


@dataclass(frozen=True)
class RngState:
    """SplitMix64 generator state plus a draw counter."""

    state: int
    counter: int = 0


def seed_rng(seed: int) -> RngState:
    return RngState(seed & MASK64, 0)


def next_nonce(rng: RngState) -> tuple[int, RngState]:
    """Draw one 64-bit value; returns (nonce, advanced state)."""
    value, state = kernels.splitmix64_next(rng.state)
    return value, RngState(state, rng.counter + 1)


def next_keystream16(rng: RngState) -> tuple[int, RngState]:
    """Draw one EPC-style RN16 word (the 16-bit PRNG path)."""
    value, rng = next_nonce(rng)
    return value & MASK16, rng


def fnv1a64(data: bytes) -> int:
    """Reference authentication hash over raw bytes."""
    return kernels.fnv1a64(data)


def auth_hash(nonce: int, key: int, hash_fn: HashFn | None = None) -> int:
    """Authentication token: hash of the 16-byte big-endian nonce||key.

    hash_fn swaps in a different bytes->int hash; the default is the
    FNV-1a-64 reference instantiation.
    """
    if hash_fn is None:
        return kernels.auth_hash_u64(nonce & MASK64, key & MASK64)
    payload = (nonce & MASK64).to_bytes(8, "big") + (key & MASK64).to_bytes(8, "big")
    return hash_fn(payload)


def crc16(data: bytes) -> int:
    """CRC-16/CCITT-FALSE checksum (poly 0x1021, init 0xFFFF)."""
    return kernels.crc16(data)


def cover_code(word: int, keystream: int) -> int:
    """XOR-mask a 16-bit word with a keystream word; self-inverse."""
    return (word ^ keystream) & MASK16
