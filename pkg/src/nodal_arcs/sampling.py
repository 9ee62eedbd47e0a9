"""Seeded point streams shared by every sampled verifier.

The generator is the 64-bit LCG ``x <- a*x + c (mod 2^64)`` with Knuth's
MMIX constants; a coordinate is ``(x >> 32) mod q``.  Coordinates are drawn
row-major: point k uses draws k*dim, ..., k*dim + dim - 1.  Blocks are
produced by jump-ahead so the stream is identical to the sequential one.
"""
from __future__ import annotations

import numpy as np

LCG_A = 6364136223846793005
LCG_C = 1442695040888963407
_MASK = (1 << 64) - 1
_BLOCK = 4096


def lcg_states(seed: int, count: int) -> np.ndarray:
    """States x_1, ..., x_count starting from x_0 = seed."""
    out = np.empty(count, dtype=np.uint64)
    if count == 0:
        return out
    first = min(count, _BLOCK)
    x = seed & _MASK
    for i in range(first):
        x = (LCG_A * x + LCG_C) & _MASK
        out[i] = x
    # x_{k+B} = A_B x_k + C_B
    A_B, C_B = 1, 0
    for _ in range(first):
        A_B, C_B = (LCG_A * A_B) & _MASK, (LCG_A * C_B + LCG_C) & _MASK
    a, c = np.uint64(A_B), np.uint64(C_B)
    pos = first
    while pos < count:
        n = min(first, count - pos)
        out[pos:pos + n] = out[pos - first:pos - first + n] * a + c
        pos += n
    return out


def sample_points(q: int, dim: int, n: int, seed: int) -> np.ndarray:
    """n pseudo-random points of F_q^dim as packed values, shape (n, dim)."""
    states = lcg_states(seed, n * dim)
    coords = (states >> np.uint64(32)) % np.uint64(q)
    return coords.astype(np.int64).reshape(n, dim)
