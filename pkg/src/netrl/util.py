"""Deterministic seed derivation shared across modules.

Python's builtin hash() is salted per process, so every derived seed in the
harness goes through mix64 instead; runs must be bit-reproducible across
processes and machines.
"""

import hashlib


def mix64(*parts: object) -> int:
    """Collapse a tuple of ints/strings into a stable unsigned 64-bit seed."""
    h = hashlib.sha256()
    for part in parts:
        h.update(repr(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest()[:8], "little")
