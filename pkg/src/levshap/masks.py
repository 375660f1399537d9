"""Subset masks over n players.

A mask is a length-n uint8 vector; entry i is the membership indicator of
player i+1 (players are 1-indexed in formulas, 0-indexed in arrays).  The
wire encoding is a string of '0'/'1' characters where character j is
player j+1, so bit 0 is the leftmost character.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_mask",
    "as_mask_matrix",
    "complement",
    "popcount",
    "mask_from_players",
    "players_of",
    "mask_to_wire",
    "mask_from_wire",
    "mask_to_int",
    "masks_from_ints",
    "mask_key",
]


def as_mask(bits, n: int | None = None) -> np.ndarray:
    """Coerce to a 1-D uint8 mask, validating entries are 0/1."""
    z = np.ascontiguousarray(bits, dtype=np.uint8)
    if z.ndim != 1:
        raise ValueError(f"mask must be 1-D, got shape {z.shape}")
    if n is not None and z.size != n:
        raise ValueError(f"mask length {z.size} != player count {n}")
    if np.any(z > 1):
        raise ValueError("mask entries must be 0 or 1")
    return z


def as_mask_matrix(masks, n: int) -> np.ndarray:
    """Coerce to a (k, n) uint8 matrix of masks."""
    zs = np.ascontiguousarray(masks, dtype=np.uint8)
    if zs.ndim == 1:
        zs = zs.reshape(1, -1)
    if zs.ndim != 2 or zs.shape[1] != n:
        raise ValueError(f"expected masks of shape (k, {n}), got {zs.shape}")
    if np.any(zs > 1):
        raise ValueError("mask entries must be 0 or 1")
    return zs


def complement(mask: np.ndarray) -> np.ndarray:
    """Flip every membership bit (works on single masks and matrices)."""
    return (1 - np.asarray(mask, dtype=np.uint8)).astype(np.uint8)


def popcount(mask: np.ndarray) -> np.ndarray | int:
    """Set size(s); scalar for a single mask, vector for a matrix."""
    m = np.asarray(mask)
    total = m.sum(axis=-1)
    return int(total) if m.ndim == 1 else total.astype(np.int64)


def mask_from_players(players, n: int) -> np.ndarray:
    """Build a mask from 1-indexed player labels."""
    z = np.zeros(n, dtype=np.uint8)
    for p in players:
        if not 1 <= p <= n:
            raise ValueError(f"player {p} out of range 1..{n}")
        z[p - 1] = 1
    return z


def players_of(mask: np.ndarray) -> tuple[int, ...]:
    """1-indexed players present in the mask, ascending."""
    return tuple(int(i) + 1 for i in np.flatnonzero(mask))


def mask_to_wire(mask: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in mask)


def mask_from_wire(s: str, n: int | None = None) -> np.ndarray:
    if n is not None and len(s) != n:
        raise ValueError(f"wire mask length {len(s)} != player count {n}")
    if any(ch not in "01" for ch in s):
        raise ValueError(f"wire mask must be '0'/'1' characters: {s!r}")
    return np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0")


def mask_to_int(mask: np.ndarray) -> int:
    """Pack a mask into an integer with bit i = player i+1."""
    return sum(1 << int(i) for i in np.flatnonzero(mask))


def masks_from_ints(codes: np.ndarray, n: int) -> np.ndarray:
    """Unpack packed integers (bit i = player i+1) into a (k, n) mask matrix.

    Only valid for n <= 63.
    """
    codes = np.asarray(codes, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.uint8)


def mask_key(mask: np.ndarray) -> bytes:
    """Hashable identity of a mask (dtype-stable bytes)."""
    return np.ascontiguousarray(mask, dtype=np.uint8).tobytes()
