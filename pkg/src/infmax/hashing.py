"""Direction-oblivious edge hashing and per-simulation sampling probabilities.

An edge {u, v} hashes to ``murmur3_32(min || max)`` masked to 31 bits, so both
stored directions agree.  Simulation r draws one random integer X[r]; the
edge's sampling value in r is ``X[r] XOR hash`` and the edge belongs to the
sampled subgraph of r iff that value is strictly below ``floor(w * H_MAX)``.
This replaces materialized subgraph sampling with an O(1) recomputable
predicate.

Hashes and randoms are kept in [0, 2^31 - 1]: membership is decided with
signed 32-bit compares, and a set bit 31 would make XOR results negative and
therefore unconditionally "sampled".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph

H_MAX = 2**31 - 1
LANE_WIDTH = 8  # simulations per batch
MURMUR_SEED = 0

_C1 = np.uint32(0xCC9E2D51)
_C2 = np.uint32(0x1B873593)


def murmur3_32(key: bytes, seed: int = 0) -> int:
    """Standard 32-bit MurmurHash3 (x86), bit-exact with the reference."""
    h = seed & 0xFFFFFFFF
    length = len(key)
    n_blocks = length // 4
    for i in range(n_blocks):
        k = int.from_bytes(key[4 * i : 4 * i + 4], "little")
        k = (k * 0xCC9E2D51) & 0xFFFFFFFF
        k = ((k << 15) | (k >> 17)) & 0xFFFFFFFF
        k = (k * 0x1B873593) & 0xFFFFFFFF
        h ^= k
        h = ((h << 13) | (h >> 19)) & 0xFFFFFFFF
        h = (h * 5 + 0xE6546B64) & 0xFFFFFFFF
    tail = key[4 * n_blocks :]
    k = 0
    if len(tail) >= 3:
        k ^= tail[2] << 16
    if len(tail) >= 2:
        k ^= tail[1] << 8
    if len(tail) >= 1:
        k ^= tail[0]
        k = (k * 0xCC9E2D51) & 0xFFFFFFFF
        k = ((k << 15) | (k >> 17)) & 0xFFFFFFFF
        k = (k * 0x1B873593) & 0xFFFFFFFF
        h ^= k
    h ^= length
    h ^= h >> 16
    h = (h * 0x85EBCA6B) & 0xFFFFFFFF
    h ^= h >> 13
    h = (h * 0xC2B2AE35) & 0xFFFFFFFF
    h ^= h >> 16
    return h


def _murmur3_pair_array(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Vectorized murmur3_32 over 8-byte keys of two little-endian uint32.

    Equivalent to ``murmur3_32(struct.pack('<II', lo[i], hi[i]), 0)`` per
    element (two full blocks, no tail).
    """
    h = np.zeros(lo.shape, dtype=np.uint32)
    with np.errstate(over="ignore"):
        for block in (lo.astype(np.uint32), hi.astype(np.uint32)):
            k = block * _C1
            k = (k << np.uint32(15)) | (k >> np.uint32(17))
            k = k * _C2
            h ^= k
            h = (h << np.uint32(13)) | (h >> np.uint32(19))
            h = h * np.uint32(5) + np.uint32(0xE6546B64)
        h ^= np.uint32(8)
        h ^= h >> np.uint32(16)
        h = h * np.uint32(0x85EBCA6B)
        h ^= h >> np.uint32(13)
        h = h * np.uint32(0xC2B2AE35)
        h ^= h >> np.uint32(16)
    return h


@dataclass(eq=False)
class EdgeHashTable:
    """Per-slot 31-bit hashes; reciprocal slots carry identical values."""

    hashes: np.ndarray  # (m,) int32 in [0, H_MAX]
    h_max: int = H_MAX


def build_hash_table(g: Graph) -> EdgeHashTable:
    lo = np.minimum(g.sources, g.adj)
    hi = np.maximum(g.sources, g.adj)
    digests = _murmur3_pair_array(lo, hi)
    return EdgeHashTable((digests & np.uint32(H_MAX)).astype(np.int32))


class SimulationRandoms:
    """One 31-bit random integer per simulation, reproducible from a seed.

    The requested count is padded up to a multiple of LANE_WIDTH; the surplus
    lanes participate in propagation but are excluded from scoring.
    """

    def __init__(self, count: int, master_seed: int = 0):
        if count < 1:
            raise ValueError(f"simulation count must be positive, got {count}")
        self.master_seed = int(master_seed)
        self.num_scored = int(count)
        padded = -(-count // LANE_WIDTH) * LANE_WIDTH
        rng = np.random.default_rng(self.master_seed)
        self.values = rng.integers(0, H_MAX, size=padded, endpoint=True,
                                   dtype=np.int64).astype(np.int32)

    @property
    def padded(self) -> int:
        return len(self.values)


def sample_prob(hash_value: int, xr: int) -> int:
    """Integer numerator of the sampling probability: Xr XOR hash.

    The edge is in sample r iff the result is strictly below
    ``floor(w * H_MAX)``.
    """
    return int(hash_value) ^ int(xr)


def threshold(w: float) -> int:
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"weight {w} outside [0, 1]")
    return int(w * H_MAX)


def lane_membership(slot: int, r0: int, w: float, table: EdgeHashTable,
                    randoms: SimulationRandoms) -> int:
    """Bitmask over LANE_WIDTH simulations starting at r0 (bit b = r0 + b)."""
    if r0 % LANE_WIDTH:
        raise ValueError(f"batch start {r0} not aligned to {LANE_WIDTH}")
    if r0 + LANE_WIDTH > randoms.padded:
        raise ValueError(f"batch [{r0}, {r0 + LANE_WIDTH}) beyond R")
    lanes = randoms.values[r0 : r0 + LANE_WIDTH] ^ np.int32(table.hashes[slot])
    bits = lanes < np.int32(threshold(w))
    return int(np.packbits(bits, bitorder="little")[0])


def slot_thresholds(g: Graph, symmetrize: bool = True) -> np.ndarray:
    """Per-slot integer inclusion thresholds floor(w * H_MAX).

    With ``symmetrize`` (the default for anything that feeds a component
    partition), each undirected edge uses the larger of its two directional
    thresholds, so membership is a property of the edge, not the direction.
    This only matters for weighted-cascade weights; every other scheme is
    symmetric already.
    """
    thr = (g.weights * H_MAX).astype(np.int64).astype(np.int32)
    if symmetrize:
        thr = np.maximum(thr, thr[g.reciprocal_slots])
    return thr
