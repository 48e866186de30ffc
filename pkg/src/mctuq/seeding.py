"""Deterministic seed derivation.

Every randomized component (schedules, synthetic worlds, bootstrap draws)
derives its own stream from a master seed plus string labels, so changing
concurrency or execution order never changes results.
"""

from __future__ import annotations

import hashlib

__all__ = ["derive_seed"]

# Unit separator keeps ("a", "bc") and ("ab", "c") from colliding.
_SEP = "\x1f"


def derive_seed(*parts: str | int | float) -> int:
    """Hash the given labels into a stable 64-bit seed.

    Uses SHA-256 rather than hash() because the latter is salted per process.
    """
    text = _SEP.join(repr(p) if isinstance(p, float) else str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
