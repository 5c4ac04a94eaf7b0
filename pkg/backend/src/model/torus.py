"""
Module: torus
Description: Geometry of the lattice torus T_n^d - row-major vertex indexing, the
wrapped l-infinity metric, the long-edge annulus and exact eligible-pair counts

Vertex ids are row-major: coordinate x_1 is the most significant digit in base n.
"""

import logging
from functools import lru_cache
from itertools import product
from typing import Iterable, List, Sequence

import numpy as np

from ..utils.exceptions import ParameterError
from .params import ModelParams

logger = logging.getLogger(__name__)


def _check_index(index: int, params: ModelParams) -> None:
    if not 0 <= index < params.vertex_count:
        raise ParameterError(f"vertex index {index} out of range [0, {params.vertex_count})")


def decode_many(indices: np.ndarray, d: int, n: int) -> np.ndarray:
    """Row-major decode of an index array into a (k, d) coordinate array"""
    indices = np.asarray(indices, dtype=np.int64)
    powers = n ** np.arange(d - 1, -1, -1, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % n


def encode_many(coords: np.ndarray, d: int, n: int) -> np.ndarray:
    """Row-major encode of a (k, d) coordinate array (coordinates taken mod n)"""
    coords = np.mod(np.asarray(coords, dtype=np.int64), n)
    powers = n ** np.arange(d - 1, -1, -1, dtype=np.int64)
    return coords @ powers


def encode(coords: Sequence[int], params: ModelParams) -> int:
    """
    Encode a coordinate tuple as a VertexId

    Raises:
        ParameterError: When the tuple has the wrong length or a coordinate is outside [0, n)
    """
    if len(coords) != params.d or any(not 0 <= x < params.n for x in coords):
        raise ParameterError(f"coordinates {tuple(coords)} invalid for d={params.d}, n={params.n}")
    return int(encode_many(np.asarray([coords]), params.d, params.n)[0])


def decode(index: int, params: ModelParams) -> tuple:
    """Decode a VertexId into its coordinate tuple"""
    _check_index(index, params)
    return tuple(int(x) for x in decode_many(np.asarray([index]), params.d, params.n)[0])


def torus_distance(u: int, v: int, params: ModelParams) -> int:
    """
    Wrapped l-infinity distance max_s min(|x_s - y_s|, n - |x_s - y_s|)

    Args:
        u: First vertex
        v: Second vertex
        params: Model parameters (only d and n are used)

    Returns:
        Distance in [0, floor(n/2)]

    Raises:
        ParameterError: When an index is out of range
    """
    _check_index(u, params)
    _check_index(v, params)
    return int(torus_distances(np.asarray([u]), np.asarray([v]), params.d, params.n)[0])


def torus_distances(u: np.ndarray, v: np.ndarray, d: int, n: int) -> np.ndarray:
    """Vectorised torus_distance over paired index arrays"""
    delta = np.abs(decode_many(u, d, n) - decode_many(v, d, n))
    return np.minimum(delta, n - delta).max(axis=1)


@lru_cache(maxsize=64)
def _annulus_offsets(d: int, lo: int, hi: int) -> np.ndarray:
    if lo > hi:
        return np.empty((0, d), dtype=np.int64)
    axis = np.arange(-hi, hi + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    offsets = grid[np.abs(grid).max(axis=1) >= lo]
    offsets.setflags(write=False)
    return offsets


def annulus_offsets(params: ModelParams) -> np.ndarray:
    """
    Offset vectors delta with ceil(alpha n) <= |delta|_inf <= floor(beta n)

    Because floor(beta n) < n/2 the offsets land on distinct vertices, so the
    annulus of u is exactly {u + delta mod n}.
    """
    lo, hi = params.window
    return _annulus_offsets(params.d, lo, hi)


def annulus(u: int, params: ModelParams) -> List[int]:
    """
    The long-edge-eligible partners Lambda_n(u) in ascending index order

    Args:
        u: Centre vertex
        params: Model parameters

    Returns:
        Sorted list of vertices v with torus_distance(u, v) in the integer window
    """
    _check_index(u, params)
    offsets = annulus_offsets(params)
    if len(offsets) == 0:
        return []
    centre = decode_many(np.asarray([u]), params.d, params.n)
    members = encode_many(centre + offsets, params.d, params.n)
    return [int(v) for v in np.sort(members)]


def annulus_size(params: ModelParams) -> int:
    """Closed form |Lambda_n(u)| = (2 floor(beta n) + 1)^d - (2 ceil(alpha n) - 1)^d"""
    lo, hi = params.window
    if lo > hi:
        return 0
    return (2 * hi + 1) ** params.d - (2 * lo - 1) ** params.d


def _cyclic_window_sum(arr: np.ndarray, radius: int) -> np.ndarray:
    """Sum of arr over the centred cube [-radius, radius]^d with wrap-around"""
    out = arr.astype(np.int64)
    if radius < 0:
        return np.zeros_like(out)
    for axis in range(out.ndim):
        n = out.shape[axis]
        padded = np.pad(out, [(radius + 1, radius) if a == axis else (0, 0) for a in range(out.ndim)],
                        mode="wrap")
        csum = np.cumsum(padded, axis=axis)
        upper = np.take(csum, np.arange(2 * radius + 1, 2 * radius + 1 + n), axis=axis)
        lower = np.take(csum, np.arange(0, n), axis=axis)
        out = upper - lower
    return out


def indicator(vertices: Iterable[int], params: ModelParams) -> np.ndarray:
    """Boolean indicator of a vertex set, shaped (n,) * d"""
    flat = np.zeros(params.vertex_count, dtype=bool)
    idx = np.fromiter(vertices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= params.vertex_count):
        raise ParameterError("subset contains out-of-range vertex ids")
    flat[idx] = True
    return flat.reshape((params.n,) * params.d)


def _ordered_pairs(source: np.ndarray, target: np.ndarray, params: ModelParams) -> int:
    lo, hi = params.window
    if lo > hi or not source.any() or not target.any():
        return 0
    in_annulus = _cyclic_window_sum(target, hi) - _cyclic_window_sum(target, lo - 1)
    return int(in_annulus[source].sum())


def eligible_cut_count(S: Iterable[int], S_prime: Iterable[int], params: ModelParams) -> int:
    """
    N(S, S'): number of unordered eligible pairs {u, v} with u in S, v in S'

    The long-edge count between S and S' is Binomial(N(S, S'), p_n).

    Args:
        S: First vertex set
        S_prime: Second vertex set (may overlap S)
        params: Model parameters

    Returns:
        Exact pair count
    """
    a = indicator(S, params)
    b = indicator(S_prime, params)
    both = a & b
    ordered = _ordered_pairs(a, b, params)
    doubled = _ordered_pairs(both, both, params)
    return ordered - doubled // 2


def box_vertices(origin: int, side: int, params: ModelParams) -> List[int]:
    """
    Vertices of the wrap-around box with lower corner origin and the given side

    Raises:
        ParameterError: When side is not in [1, n]
    """
    _check_index(origin, params)
    if not 1 <= side <= params.n:
        raise ParameterError(f"box side {side} must lie in [1, {params.n}]")
    corner = decode_many(np.asarray([origin]), params.d, params.n)
    steps = np.asarray(list(product(range(side), repeat=params.d)), dtype=np.int64)
    return sorted(int(v) for v in encode_many(corner + steps, params.d, params.n))
