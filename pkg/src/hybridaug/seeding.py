"""Deterministic derivation of per-purpose random seeds.

All randomness in the toolkit is keyed by ``seed_derive(master, purpose, ...)``
so results do not depend on execution order or on how work is scheduled.

The derivation is 64-bit FNV-1a over a tagged byte encoding of the tuple
``(master, purpose, *parts)``:

* integers: ``b"i"`` + 8-byte little-endian two's complement (masked to 64 bits)
* strings:  ``b"s"`` + 4-byte little-endian length + UTF-8 bytes

Encoding every element with a type tag and length prevents ambiguity such as
``("ab", "c")`` versus ``("a", "bc")``.  A final avalanche step (the
splitmix64 finaliser) spreads nearby inputs across the output range.
"""

from __future__ import annotations

import struct

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = (1 << 64) - 1


def _encode(part: int | str) -> bytes:
    if isinstance(part, bool):
        part = int(part)
    if isinstance(part, int):
        return b"i" + struct.pack("<Q", part & MASK64)
    if isinstance(part, str):
        raw = part.encode("utf-8")
        return b"s" + struct.pack("<I", len(raw)) + raw
    raise TypeError(f"seed parts must be int or str, not {type(part).__name__}")


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


def _finalise(h: int) -> int:
    h ^= h >> 30
    h = (h * 0xBF58476D1CE4E5B9) & MASK64
    h ^= h >> 27
    h = (h * 0x94D049BB133111EB) & MASK64
    h ^= h >> 31
    return h


def seed_derive(master: int, purpose: str, *parts: int | str) -> int:
    """Derive a 64-bit seed for ``purpose`` from ``master``."""
    payload = b"".join(_encode(p) for p in (master, purpose, *parts))
    return _finalise(fnv1a64(payload))
