"""
Module: generator
Description: Samplers for the modified Newman-Watts graph and the original NW ring

The fast sampler draws K ~ Binomial(N, p_n) over the N eligible pairs, then K
distinct pairs uniformly (u uniform, v uniform in the annulus of u, duplicates
rejected). By exchangeability this equals independent Bernoulli(p_n) inclusion of
every eligible pair. The per-pair reference sampler is kept for small n as the
distributional oracle.
"""

import logging
import math
from typing import Optional

import numpy as np

from ..model.params import ModelParams
from ..model.torus import annulus_offsets, annulus_size, decode_many, encode_many
from ..utils.exceptions import ParameterError, ResourceCapError
from ..utils.parallel import parallel_map
from ..utils.settings import get_settings
from . import rng
from .edge_list import EdgeList, ModelKind, normalise_pairs

logger = logging.getLogger(__name__)

PAIR_CHUNK = 1 << 16


def eligible_pair_count(params: ModelParams) -> int:
    """Number of unordered eligible pairs N(V_n, V_n) = n^d * |Lambda_n| / 2"""
    return params.vertex_count * annulus_size(params) // 2


def _draw_pairs(params: ModelParams, count: int, round_index: int, chunk_index: int) -> np.ndarray:
    gen = rng.chunk_stream(params.seed, round_index, chunk_index)
    offsets = annulus_offsets(params)
    u = gen.integers(0, params.vertex_count, size=count, dtype=np.int64)
    pick = gen.integers(0, len(offsets), size=count, dtype=np.int64)
    v = encode_many(decode_many(u, params.d, params.n) + offsets[pick], params.d, params.n)
    return normalise_pairs(u, v, params.vertex_count)


def _all_eligible_pairs(params: ModelParams) -> np.ndarray:
    offsets = annulus_offsets(params)
    if len(offsets) == 0:
        return np.empty((0, 2), dtype=np.int64)
    vertices = np.arange(params.vertex_count, dtype=np.int64)
    coords = decode_many(vertices, params.d, params.n)
    partners = encode_many(coords[:, None, :] + offsets[None, :, :], params.d, params.n)
    u = np.repeat(vertices, len(offsets))
    v = partners.reshape(-1)
    keep = u < v
    return normalise_pairs(u[keep], v[keep], params.vertex_count)


def generate(params: ModelParams, threads: Optional[int] = None) -> EdgeList:
    """
    Sample the long edges of G_n(alpha, beta, sigma, zeta)

    Args:
        params: Model parameters (the seed fixes the realisation)
        threads: Worker threads; the output does not depend on it

    Returns:
        EdgeList with sorted, distinct long edges

    Raises:
        ParameterError: When p_n > 1 or n < 3 (enforced by ModelParams)
    """
    try:
        total_pairs = eligible_pair_count(params)
        empty = np.empty((0, 2), dtype=np.int64)
        if params.p_n == 0.0 or total_pairs == 0:
            logger.info(f"No long edges possible (p_n={params.p_n}, N={total_pairs}); pure torus")
            return EdgeList(ModelKind.MODIFIED, params.d, params.n, empty, params, params.seed)

        count_gen = rng.stream(params.seed, rng.STREAM_EDGE_COUNT)
        target = int(count_gen.binomial(total_pairs, params.p_n))
        logger.info(
            f"Sampling {target} long edges out of N={total_pairs} eligible pairs "
            f"(d={params.d}, n={params.n}, p_n={params.p_n:.4g})"
        )

        if 2 * target > total_pairs:
            # dense regime: choose the excluded pairs instead
            pairs = _all_eligible_pairs(params)
            excluded = count_gen.choice(total_pairs, size=total_pairs - target, replace=False)
            keep = np.ones(total_pairs, dtype=bool)
            keep[excluded] = False
            return EdgeList(ModelKind.MODIFIED, params.d, params.n, pairs[keep], params, params.seed)

        edges = empty
        round_index = 0
        while len(edges) < target:
            need = target - len(edges)
            chunks = math.ceil(need / PAIR_CHUNK)
            sizes = [min(PAIR_CHUNK, need - c * PAIR_CHUNK) for c in range(chunks)]
            drawn = parallel_map(
                lambda job: _draw_pairs(params, job[1], round_index, job[0]),
                list(enumerate(sizes)),
                threads,
            )
            merged = np.concatenate([edges] + drawn)
            edges = normalise_pairs(merged[:, 0], merged[:, 1], params.vertex_count)
            logger.debug(f"Round {round_index}: {len(edges)}/{target} distinct pairs")
            round_index += 1

        return EdgeList(ModelKind.MODIFIED, params.d, params.n, edges, params, params.seed)

    except Exception as e:
        logger.error(f"Error in generate: {e}")
        raise


def generate_reference(params: ModelParams) -> EdgeList:
    """
    Per-pair Bernoulli(p_n) sampler over every eligible pair (small n only)

    Raises:
        ResourceCapError: When n exceeds Settings.reference_sampler_max_n
    """
    cap = get_settings().reference_sampler_max_n
    if params.n > cap:
        raise ResourceCapError("reference_sampler_max_n", cap, params.n)

    pairs = _all_eligible_pairs(params)
    draws = rng.stream(params.seed, rng.STREAM_REFERENCE).random(len(pairs))
    edges = pairs[draws < params.p_n]
    logger.debug(f"Reference sampler kept {len(edges)} of {len(pairs)} eligible pairs")
    return EdgeList(ModelKind.MODIFIED, params.d, params.n, edges, params, params.seed)


def generate_original_nw(n: int, p: float, seed: int = 0) -> EdgeList:
    """
    Original NW ring baseline with Poisson shortcut stubs

    Each vertex x draws xi_x ~ Poisson(p) shortcut stubs; each stub's other end is
    uniform on the ring. Loops and repeated or ring-duplicating shortcuts are
    collapsed to keep the graph simple; the raw stub count is kept.

    Args:
        n: Ring size (>= 3)
        p: Poisson mean per vertex (>= 0)
        seed: 64-bit seed

    Returns:
        EdgeList of kind ORIGINAL with d = 1

    Raises:
        ParameterError: When n < 3 or p < 0
    """
    if n < 3:
        raise ParameterError(f"ring size must be >= 3, got {n}")
    if p < 0 or not math.isfinite(p):
        raise ParameterError(f"shortcut mean must be finite and >= 0, got {p}")

    gen = rng.stream(seed, rng.STREAM_ORIGINAL_NW)
    stubs_per_vertex = gen.poisson(p, size=n)
    raw_stubs = int(stubs_per_vertex.sum())
    sources = np.repeat(np.arange(n, dtype=np.int64), stubs_per_vertex)
    targets = gen.integers(0, n, size=raw_stubs, dtype=np.int64)

    gap = np.abs(sources - targets)
    simple = (gap != 0) & (gap != 1) & (gap != n - 1)
    edges = normalise_pairs(sources[simple], targets[simple], n)
    logger.info(f"Original NW ring n={n}, p={p}: {raw_stubs} stubs collapsed to {len(edges)} shortcuts")
    return EdgeList(
        ModelKind.ORIGINAL, 1, n, edges, None, seed, shortcut_mean=p, raw_stub_count=raw_stubs
    )
