"""Deterministic master-bitstream plumbing.

A master seed (hex string) is expanded with the counter-based Philox
generator so that the bytes belonging to stream index i depend only on
(key, i), never on how requests are batched or which worker produced them.
The bitstream convention, used everywhere bits are metered: Philox 64-bit
output words are serialized big-endian, and bits are consumed MSB-first
from that byte sequence. Reading a word MSB-first is the same as reading
its big-endian bytes MSB-first, so batch code can stay on native uint64
words while byte-level callers see the identical stream.
"""

from __future__ import annotations

import hashlib

import numpy as np

# Philox-4x64 emits four 64-bit words per counter increment.
_PHILOX_BLOCK_BYTES = 32
_PHILOX_BLOCK_WORDS = 4

# Widest block that always spans at most two 64-bit words at any offset.
_FAST_BLOCK_BITS = 57


def normalize_hex_seed(master_hex: str) -> str:
    """Canonicalize a hex master seed (strip 0x, lowercase, even length)."""
    s = master_hex.strip().lower()
    if s.startswith("0x"):
        s = s[2:]
    if s == "":
        s = "00"
    if len(s) % 2:
        s = "0" + s
    int(s, 16)  # raises ValueError on junk
    return s


def derive_key(master_hex: str, *labels: object) -> int:
    """Derive a 128-bit Philox key from a master seed and context labels.

    Distinct label tuples give independent streams from one master seed.
    """
    h = hashlib.sha256()
    h.update(bytes.fromhex(normalize_hex_seed(master_hex)))
    for lab in labels:
        h.update(b"/")
        h.update(str(lab).encode("utf-8"))
    return int.from_bytes(h.digest()[:16], "big")


def subseed(master_hex: str, *labels: object) -> str:
    """Derive a fresh 128-bit hex master seed for a labelled sub-stream."""
    h = hashlib.sha256()
    h.update(bytes.fromhex(normalize_hex_seed(master_hex)))
    for lab in labels:
        h.update(b"|")
        h.update(str(lab).encode("utf-8"))
    return h.hexdigest()[:32]


def _philox_words(key: int, index: int, count: int, words_per_index: int) -> np.ndarray:
    """Raw words for indices [index, index+count), shape (count, wpi).

    Index i always occupies Philox counters [i*b, (i+1)*b) for
    b = ceil(wpi/4) blocks, so the result is independent of batching.
    """
    if count < 0 or words_per_index <= 0 or index < 0:
        raise ValueError("index/count must be non-negative and width positive")
    blocks = -(-words_per_index // _PHILOX_BLOCK_WORDS)
    bg = np.random.Philox(key=key, counter=index * blocks)
    raw = bg.random_raw(count * blocks * _PHILOX_BLOCK_WORDS)
    return raw.reshape(count, blocks * _PHILOX_BLOCK_WORDS)[:, :words_per_index]


def stream_words(key: int, index: int, count: int, nwords: int) -> np.ndarray:
    """Native uint64 view of the per-index bitstreams (word j holds stream
    bits [64j, 64j+64), MSB first)."""
    return _philox_words(key, index, count, nwords)


def stream_bytes(key: int, index: int, count: int, nbytes: int) -> np.ndarray:
    """Byte view of the per-index bitstreams, shape (count, nbytes)."""
    nwords = -(-nbytes // 8)
    words = _philox_words(key, index, count, nwords)
    data = words.astype(">u8").view(np.uint8).reshape(count, nwords * 8)
    return data[:, :nbytes]


def words_from_bytes(data: np.ndarray) -> np.ndarray:
    """Repack a (rows, nbytes) byte matrix as MSB-first uint64 words."""
    if data.ndim != 2 or data.dtype != np.uint8:
        raise ValueError("data must be a 2-D uint8 array")
    rows, nbytes = data.shape
    nwords = -(-nbytes // 8)
    padded = np.zeros((rows, nwords * 8), dtype=np.uint8)
    padded[:, :nbytes] = data
    return padded.view(">u8").astype(np.uint64)


def extract_blocks_from_words(words: np.ndarray, n_blocks: int, block_bits: int) -> np.ndarray:
    """Read consecutive block_bits-wide big-endian integers from each row.

    Block j of a row covers stream bits [j*block_bits, (j+1)*block_bits).
    Requires block_bits <= 57 so every block spans at most two words.
    Returns uint64 (values < 2^block_bits).
    """
    if block_bits < 1 or block_bits > _FAST_BLOCK_BITS:
        raise ValueError(f"block_bits must be in 1..{_FAST_BLOCK_BITS}")
    rows, nwords = words.shape
    if n_blocks * block_bits > nwords * 64:
        raise ValueError(f"rows carry {nwords * 64} bits, need {n_blocks * block_bits}")
    offsets = np.arange(n_blocks, dtype=np.int64) * block_bits
    wi = offsets >> 6
    r = (offsets & 63).astype(np.uint64)
    if int(wi[-1]) + 1 >= nwords:
        ext = np.zeros((rows, int(wi[-1]) + 2), dtype=np.uint64)
        ext[:, :nwords] = words
        words = ext
    hi = np.take(words, wi, axis=1)
    lo = np.take(words, wi + 1, axis=1)
    np.left_shift(hi, r, out=hi)
    # (lo >> 1) >> (63 - r) == lo >> (64 - r) without the undefined r = 0 case
    np.right_shift(lo, np.uint64(1), out=lo)
    np.right_shift(lo, np.uint64(63) - r, out=lo)
    np.bitwise_or(hi, lo, out=hi)
    np.right_shift(hi, np.uint64(64 - block_bits), out=hi)
    return hi


def extract_blocks(data: np.ndarray, n_blocks: int, block_bits: int) -> np.ndarray:
    """Byte-matrix counterpart of :func:`extract_blocks_from_words`.

    Falls back to exact Python integers for blocks wider than 57 bits.
    """
    if data.ndim != 2 or data.dtype != np.uint8:
        raise ValueError("data must be a 2-D uint8 array")
    if block_bits < 1:
        raise ValueError("block_bits must be positive")
    rows, nbytes = data.shape
    if n_blocks * block_bits > nbytes * 8:
        raise ValueError(f"rows carry {nbytes * 8} bits, need {n_blocks * block_bits}")
    if block_bits <= _FAST_BLOCK_BITS:
        blocks = extract_blocks_from_words(words_from_bytes(data), n_blocks, block_bits)
        return blocks.astype(np.int64)
    out = np.empty((rows, n_blocks), dtype=object)
    total = nbytes * 8
    for row in range(rows):
        big = int.from_bytes(data[row].tobytes(), "big")
        for j in range(n_blocks):
            lo = total - (j + 1) * block_bits
            out[row, j] = (big >> lo) & ((1 << block_bits) - 1)
    return out
