"""
Module: rng
Description: Counter-based, splittable random streams

Every stream is a Philox generator keyed by (seed, stream id). Output is a pure
function of the key and the draw counter, so results are bit-identical across
platforms and independent of how work is scheduled onto threads.
"""

import hashlib

import numpy as np

STREAM_EDGE_COUNT = 0
STREAM_REFERENCE = 1
STREAM_ORIGINAL_NW = 2
STREAM_SOURCES = 3
STREAM_SPECTRAL = 4
STREAM_BOOTSTRAP = 5

_CHUNK_BASE = 1 << 32


def stream(seed: int, stream_id: int) -> np.random.Generator:
    """
    Generator for one (seed, stream id) key

    Args:
        seed: 64-bit unsigned seed
        stream_id: 64-bit stream identifier

    Returns:
        numpy Generator backed by Philox
    """
    key = (int(stream_id) << 64) | (int(seed) & 0xFFFFFFFFFFFFFFFF)
    return np.random.Generator(np.random.Philox(key=key))


def chunk_stream(seed: int, round_index: int, chunk_index: int) -> np.random.Generator:
    """Stream for one chunk of pair draws in a given rejection round"""
    return stream(seed, _CHUNK_BASE + (round_index << 24) + chunk_index)


def derive_seed(seed: int, label: str, index: int) -> int:
    """seed XOR a 64-bit BLAKE2b hash of (label, index)"""
    digest = hashlib.blake2b(f"{label}|{index}".encode(), digest_size=8).digest()
    return (int(seed) ^ int.from_bytes(digest, "big")) & 0xFFFFFFFFFFFFFFFF
