"""
Module: boxes
Description: Empty-box scan - wrap-around boxes of side ceil(2 ln^r n) with no
long edge crossing to their complement, their exact emptiness probability, and
the escape-time lower bound on the mixing time such a box certifies
"""

import logging
import math
from dataclasses import asdict, dataclass
from itertools import product
from typing import Any, Dict, List

import numpy as np

from ..generation.edge_list import EdgeList
from ..model.params import ModelParams
from ..model.torus import annulus_size, box_vertices, decode_many, eligible_cut_count, encode_many
from ..utils.exceptions import ParameterError
from .graph import Graph, bfs_distances
from .walk import MIXING_THRESHOLD, stationary_distribution

logger = logging.getLogger(__name__)


def box_side(n: int, r: float) -> int:
    """
    Box side s = ceil(2 ln^r n)

    Raises:
        ParameterError: When s >= n
    """
    if n < 3:
        raise ParameterError(f"torus side must be >= 3, got {n}")
    side = max(1, math.ceil(2.0 * math.log(n) ** r))
    if side >= n:
        raise ParameterError(f"box side {side} = ceil(2 ln^{r} {n}) must be < n")
    return side


def _corner_box_sums(arr: np.ndarray, side: int) -> np.ndarray:
    """out[o] = sum of arr over the wrap-around box o + [0, side)^d"""
    out = arr.astype(np.int64)
    for axis in range(out.ndim):
        n = out.shape[axis]
        padded = np.pad(out, [(0, side - 1) if a == axis else (0, 0) for a in range(out.ndim)], mode="wrap")
        zero_shape = list(padded.shape)
        zero_shape[axis] = 1
        csum = np.cumsum(np.concatenate([np.zeros(zero_shape, dtype=np.int64), padded], axis=axis), axis=axis)
        out = np.take(csum, np.arange(side, side + n), axis=axis) - np.take(csum, np.arange(n), axis=axis)
    return out


def _interior_edge_counts(long_edges: np.ndarray, d: int, n: int, side: int) -> np.ndarray:
    """Per origin, the number of long edges with both endpoints inside the box"""
    counts = np.zeros((n,) * d, dtype=np.int64)
    if len(long_edges) == 0:
        return counts
    cu = decode_many(long_edges[:, 0], d, n)
    cv = decode_many(long_edges[:, 1], d, n)
    delta = (cv - cu) % n
    near = np.minimum(delta, n - delta) < side
    offsets = np.arange(side)
    for e in np.flatnonzero(near.all(axis=1)):
        axes = []
        for j in range(d):
            # origin o_j = u_j - t contains u_j; it also contains v_j iff (t + delta) mod n < side
            valid = offsets[(offsets + delta[e, j]) % n < side]
            axes.append(np.unique((cu[e, j] - valid) % n))
        counts[np.ix_(*axes)] += 1
    return counts


def empty_box_scan(edges: EdgeList, r: float) -> List[int]:
    """
    Origins of all boxes of side ceil(2 ln^r n) with no long edge crossing out

    The crossing count of the box at o is the box sum of the long-edge degree
    minus twice the number of long edges lying inside it. Boxes wrap around.

    Args:
        edges: Sampled edge list
        r: Box exponent

    Returns:
        Ascending VertexIds of the qualifying lower corners

    Raises:
        ParameterError: When the box side is >= n
    """
    try:
        side = box_side(edges.n, r)
        d, n = edges.d, edges.n
        long_degree = np.bincount(edges.long_edges.reshape(-1), minlength=edges.vertex_count)
        incident = _corner_box_sums(long_degree.reshape((n,) * d), side)
        crossing = incident - 2 * _interior_edge_counts(edges.long_edges, d, n, side)
        origins = np.flatnonzero(crossing.reshape(-1) == 0)
        logger.debug(f"{len(origins)} of {edges.vertex_count} boxes of side {side} have no crossing long edge")
        return [int(o) for o in origins]

    except Exception as e:
        logger.error(f"Error in empty_box_scan: {e}")
        raise


def box_crossing_pairs(params: ModelParams, side: int) -> int:
    """N(B, B^c) for any box of the given side"""
    members = box_vertices(0, side, params)
    inside = eligible_cut_count(members, members, params)
    return len(members) * annulus_size(params) - 2 * inside


def empty_box_probability(params: ModelParams, r: float) -> float:
    """Exact P(no long edge crosses a fixed box) = (1 - p_n)^N(B, B^c)"""
    pairs = box_crossing_pairs(params, box_side(params.n, r))
    if pairs == 0:
        return 1.0
    if params.p_n >= 1.0:
        return 0.0
    return math.exp(pairs * math.log1p(-params.p_n))


def expected_empty_boxes(params: ModelParams, r: float) -> float:
    """Expected number of empty boxes among the floor(n/s)^d disjoint boxes"""
    side = box_side(params.n, r)
    return (params.n // side) ** params.d * empty_box_probability(params, r)


@dataclass
class BoxEscapeBound:
    """
    Mixing-time lower bound certified by one box

    Attributes:
        origin: Box lower corner
        side: Box side
        centre: Start vertex of the walk
        escape_distance: Hop distance from the centre to the box complement
        outside_mass: pi(B^c)
        certified: outside_mass >= 1/e, so TV >= 1/e until the walk can leave
        lower_bound: T_mix >= lower_bound (0 when not certified)
    """
    origin: int
    side: int
    centre: int
    escape_distance: int
    outside_mass: float
    certified: bool
    lower_bound: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def box_escape_lower_bound(g: Graph, origin: int, side: int) -> BoxEscapeBound:
    """
    Certified T_mix lower bound from a box

    A walk from the box centre has P^t(centre, B^c) = 0 while t is below the hop
    distance to B^c, so its TV distance is at least pi(B^c) until then.

    Raises:
        ParameterError: When origin or side are out of range
    """
    if not 0 <= origin < g.vertex_count:
        raise ParameterError(f"origin {origin} out of range")
    if not 1 <= side < g.n:
        raise ParameterError(f"box side {side} must lie in [1, {g.n})")
    corner = decode_many(np.asarray([origin]), g.d, g.n)
    steps = np.asarray(list(product(range(side), repeat=g.d)), dtype=np.int64)
    members = encode_many(corner + steps, g.d, g.n)
    centre = int(encode_many(corner + side // 2, g.d, g.n)[0])

    outside = np.ones(g.vertex_count, dtype=bool)
    outside[members] = False
    distance = int(bfs_distances(g, centre)[outside].min())
    mass = float(stationary_distribution(g).pi[outside].sum())
    certified = mass >= MIXING_THRESHOLD
    bound = BoxEscapeBound(origin, side, centre, distance, mass, certified, distance if certified else 0)
    logger.debug(f"Box at {origin} (side {side}): escape distance {distance}, pi(B^c)={mass:.4f}")
    return bound
