"""
Module: graph
Description: Materialised adjacency of a sampled graph with subset statistics,
BFS distances and exact (iFUB) or sampled diameter
"""

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from ..generation import rng
from ..generation.edge_list import EdgeList, ModelKind
from ..model.params import ModelParams
from ..model.torus import decode_many, encode_many
from ..utils.exceptions import GraphFormatError, ParameterError
from ..utils.parallel import parallel_map
from ..utils.settings import get_settings

logger = logging.getLogger(__name__)

# max distance-matrix cells materialised per BFS batch
BFS_BATCH_CELLS = 1 << 22

Subset = Union[Iterable[int], int]


@dataclass
class Graph:
    """
    Simple undirected graph on the n^d torus vertices

    Each neighbour list holds the torus neighbours (ascending) followed by the
    long-edge neighbours (ascending).

    Attributes:
        d: Torus dimension
        n: Torus side
        indptr: CSR row pointers
        indices: CSR neighbour ids
        is_long: Per-entry flag, True for long-edge entries
        degrees: Vertex degrees
        kind: Producing model
        params: Model parameters when known
        merged_long_edges: Long edges dropped because they duplicate a torus edge
    """
    d: int
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    is_long: np.ndarray
    degrees: np.ndarray
    kind: ModelKind = ModelKind.MODIFIED
    params: Optional[ModelParams] = None
    merged_long_edges: int = 0
    _adjacency: Optional[csr_matrix] = field(default=None, repr=False)
    _sources: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def vertex_count(self) -> int:
        return len(self.degrees)

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    @property
    def long_edge_count(self) -> int:
        return int(self.is_long.sum()) // 2

    @property
    def adjacency(self) -> csr_matrix:
        if self._adjacency is None:
            data = np.ones(len(self.indices), dtype=np.float64)
            shape = (self.vertex_count, self.vertex_count)
            self._adjacency = csr_matrix((data, self.indices, self.indptr), shape=shape)
        return self._adjacency

    @property
    def entry_sources(self) -> np.ndarray:
        """Source vertex of every CSR entry"""
        if self._sources is None:
            self._sources = np.repeat(np.arange(self.vertex_count, dtype=np.int64), self.degrees)
        return self._sources

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]


@dataclass
class CutStats:
    """
    Statistics of a vertex subset S

    Attributes:
        subset_size: |S|
        volume: Vol(S), the degree sum over S
        edge_cut: Number of edges between S and its complement
        long_edge_cut: Number of long edges between S and its complement
        stationary_mass: pi(S) = Vol(S) / 2|E|
    """
    subset_size: int
    volume: int
    edge_cut: int
    long_edge_cut: int
    stationary_mass: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class DiameterResult:
    """
    Diameter measurement

    Attributes:
        value: Diameter (exact) or the best certified lower bound (sampled)
        exact: True when value is the exact diameter
        method: "ifub", "all-sources" or "sampled"
        bfs_count: Number of BFS traversals performed
    """
    value: int
    exact: bool
    method: str
    bfs_count: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def torus_neighbor_table(d: int, n: int) -> np.ndarray:
    """(n^d, 2d) array of torus neighbours, ascending per row"""
    vertices = np.arange(n**d, dtype=np.int64)
    coords = decode_many(vertices, d, n)
    columns = []
    for axis in range(d):
        for step in (-1, 1):
            shifted = coords.copy()
            shifted[:, axis] += step
            columns.append(encode_many(shifted, d, n))
    return np.sort(np.stack(columns, axis=1), axis=1)


def build(edges: EdgeList) -> Graph:
    """
    Materialise the adjacency of torus plus long edges

    Long edges that coincide with a torus edge (possible when the eligible window
    starts at distance 1) are merged into it so the graph stays simple.

    Args:
        edges: Sampled realisation

    Returns:
        Graph satisfying degree(u) = 2d + long_degree(u)

    Raises:
        GraphFormatError: On a malformed edge list
    """
    try:
        edges.validate()
        d, n = edges.d, edges.n
        if n < 3:
            raise GraphFormatError(f"torus side must be >= 3, got {n}")
        vertex_count = n**d
        torus = torus_neighbor_table(d, n)

        long_pairs = np.asarray(edges.long_edges, dtype=np.int64).reshape(-1, 2)
        if len(long_pairs):
            u, v = long_pairs[:, 0], long_pairs[:, 1]
            duplicate = (torus[u] == v[:, None]).any(axis=1)
            merged = int(duplicate.sum())
            if merged:
                logger.warning(f"Merged {merged} long edges that coincide with torus edges")
            long_pairs = long_pairs[~duplicate]
        else:
            merged = 0

        src = np.concatenate([long_pairs[:, 0], long_pairs[:, 1]])
        dst = np.concatenate([long_pairs[:, 1], long_pairs[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        long_degree = np.bincount(src, minlength=vertex_count)

        degrees = 2 * d + long_degree
        indptr = np.zeros(vertex_count + 1, dtype=np.int64)
        np.cumsum(degrees, out=indptr[1:])
        indices = np.empty(indptr[-1], dtype=np.int64)
        is_long = np.zeros(indptr[-1], dtype=bool)

        torus_slots = indptr[:-1, None] + np.arange(2 * d)[None, :]
        indices[torus_slots.reshape(-1)] = torus.reshape(-1)
        if len(src):
            first = np.searchsorted(src, src, side="left")
            rank = np.arange(len(src)) - first
            slots = indptr[src] + 2 * d + rank
            indices[slots] = dst
            is_long[slots] = True

        graph = Graph(d, n, indptr, indices, is_long, degrees.astype(np.int64),
                      edges.kind, edges.params, merged)
        logger.info(
            f"Built graph: {vertex_count} vertices, {graph.edge_count} edges "
            f"({graph.long_edge_count} long)"
        )
        return graph

    except Exception as e:
        logger.error(f"Error in build: {e}")
        raise


def max_degree(g: Graph) -> int:
    """Maximum degree Delta(G)"""
    return int(g.degrees.max())


def long_degrees(g: Graph) -> np.ndarray:
    """Per-vertex long-edge degree"""
    return g.degrees - 2 * g.d


def subset_from_mask(mask: int, vertex_count: int) -> np.ndarray:
    """Vertex ids encoded by the bits of an integer mask (vertex_count <= 64)"""
    if vertex_count > 64:
        raise ParameterError("bitmask subsets are limited to 64 vertices")
    return np.asarray([i for i in range(vertex_count) if (mask >> i) & 1], dtype=np.int64)


def _subset_indicator(g: Graph, S: Subset) -> np.ndarray:
    if isinstance(S, (int, np.integer)):
        members = subset_from_mask(int(S), g.vertex_count)
    else:
        members = np.unique(np.fromiter(S, dtype=np.int64))
    if len(members) and (members[0] < 0 or members[-1] >= g.vertex_count):
        raise ParameterError("subset contains out-of-range vertex ids")
    if len(members) == 0 or len(members) == g.vertex_count:
        raise ParameterError("subset must be a nonempty proper subset of the vertices")
    mask = np.zeros(g.vertex_count, dtype=bool)
    mask[members] = True
    return mask


def cut_stats(g: Graph, S: Subset) -> CutStats:
    """
    Exact statistics of S in one pass over the adjacency

    Args:
        g: Graph
        S: Vertex ids, or an integer bitmask when the graph has <= 64 vertices

    Returns:
        CutStats for S

    Raises:
        ParameterError: When S is empty, the full vertex set, or out of range
    """
    mask = _subset_indicator(g, S)
    crossing = mask[g.entry_sources] & ~mask[g.indices]
    volume = int(g.degrees[mask].sum())
    return CutStats(
        subset_size=int(mask.sum()),
        volume=volume,
        edge_cut=int(crossing.sum()),
        long_edge_cut=int((crossing & g.is_long).sum()),
        stationary_mass=volume / float(g.degrees.sum()),
    )


def _distance_rows(g: Graph, sources: np.ndarray) -> np.ndarray:
    dist = shortest_path(g.adjacency, method="D", directed=False, unweighted=True, indices=sources)
    dist = np.atleast_2d(dist)
    if not np.isfinite(dist).all():
        raise GraphFormatError("graph is disconnected")
    return dist.astype(np.int64)


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """
    Hop distances from source to every vertex

    Raises:
        ParameterError: When source is out of range
    """
    if not 0 <= source < g.vertex_count:
        raise ParameterError(f"source {source} out of range")
    return _distance_rows(g, np.asarray([source]))[0]


def _batches(sources: np.ndarray, vertex_count: int) -> list:
    size = max(1, BFS_BATCH_CELLS // max(vertex_count, 1))
    return [sources[i:i + size] for i in range(0, len(sources), size)]


def eccentricities(g: Graph, sources: Sequence[int], threads: Optional[int] = None) -> np.ndarray:
    """Eccentricity of every source, computed in parallel batches"""
    sources = np.asarray(sources, dtype=np.int64)
    if len(sources) == 0:
        return np.empty(0, dtype=np.int64)
    parts = parallel_map(
        lambda batch: _distance_rows(g, batch).max(axis=1),
        _batches(sources, g.vertex_count),
        threads,
    )
    return np.concatenate(parts)


def double_sweep(g: Graph) -> tuple:
    """
    Two BFS sweeps from the highest-degree vertex

    Returns:
        (lower bound on the diameter, farthest endpoint a, distances from a)
    """
    start = int(np.argmax(g.degrees))
    a = int(np.argmax(bfs_distances(g, start)))
    from_a = bfs_distances(g, a)
    return int(from_a.max()), a, from_a


def _ifub(g: Graph, threads: Optional[int]) -> DiameterResult:
    lower, a, from_a = double_sweep(g)
    b = int(np.argmax(from_a))
    from_b = bfs_distances(g, b)
    span = int(from_a[b])
    on_path = (from_a + from_b == span) & (from_a == span // 2)
    root = int(np.flatnonzero(on_path)[0])
    from_root = bfs_distances(g, root)
    bfs_count = 4

    level = int(from_root.max())
    lower = max(lower, int(from_b.max()), level)
    upper = 2 * level
    budget = max(g.vertex_count // 4, 1)
    fallback_cap = get_settings().all_sources_fallback_vertices

    while upper > lower:
        fringe = np.flatnonzero(from_root == level)
        lower = max(lower, int(eccentricities(g, fringe, threads).max()))
        bfs_count += len(fringe)
        logger.debug(f"iFUB level {level}: {len(fringe)} vertices, bounds [{lower}, {upper}]")
        if lower > 2 * (level - 1):
            upper = lower
            break
        upper = 2 * (level - 1)
        level -= 1
        if upper > lower and bfs_count > budget and g.vertex_count <= fallback_cap:
            logger.info(f"iFUB not certified after {bfs_count} BFS; falling back to all sources")
            remaining = np.flatnonzero(from_root <= level)
            lower = max(lower, int(eccentricities(g, remaining, threads).max()))
            return DiameterResult(lower, True, "all-sources", bfs_count + len(remaining))

    return DiameterResult(lower, True, "ifub", bfs_count)


def diameter(
    g: Graph,
    mode: str = "exact",
    samples: int = 32,
    seed: int = 0,
    threads: Optional[int] = None,
) -> DiameterResult:
    """
    Graph diameter

    Args:
        g: Connected graph
        mode: "exact" (iFUB with certified bounds) or "sampled"
        samples: Number of random sources in sampled mode
        seed: Seed for the sampled sources
        threads: Worker threads; results do not depend on it

    Returns:
        DiameterResult; sampled results are lower bounds and flagged exact=False

    Raises:
        ParameterError: On an unknown mode or a non-positive sample count
    """
    if g.vertex_count == 1:
        return DiameterResult(0, True, "trivial", 0)
    if mode == "exact":
        result = _ifub(g, threads)
        logger.info(f"Exact diameter {result.value} ({result.method}, {result.bfs_count} BFS)")
        return result
    if mode == "sampled":
        if samples < 1:
            raise ParameterError(f"samples must be >= 1, got {samples}")
        gen = rng.stream(seed, rng.STREAM_SOURCES)
        sources = np.sort(gen.choice(g.vertex_count, size=min(samples, g.vertex_count), replace=False))
        value = int(eccentricities(g, sources, threads).max())
        logger.info(f"Sampled diameter lower bound {value} from {len(sources)} sources")
        return DiameterResult(value, False, "sampled", len(sources))
    raise ParameterError(f"unknown diameter mode {mode!r}")


def distance_histogram(
    g: Graph, sources: Optional[Sequence[int]] = None, threads: Optional[int] = None
) -> Dict[int, int]:
    """
    Counts of (source, target) pairs at each hop distance

    Args:
        g: Graph
        sources: Sources to aggregate over (all vertices when None)
        threads: Worker threads

    Returns:
        Mapping distance -> count, ascending by distance
    """
    if sources is None:
        sources = np.arange(g.vertex_count, dtype=np.int64)
    sources = np.asarray(sources, dtype=np.int64)
    parts = parallel_map(
        lambda batch: np.bincount(_distance_rows(g, batch).reshape(-1)),
        _batches(sources, g.vertex_count),
        threads,
    )
    total = np.zeros(max(len(p) for p in parts), dtype=np.int64)
    for part in parts:
        total[:len(part)] += part
    return {int(k): int(c) for k, c in enumerate(total) if c}


def write_distance_histogram(histogram: Dict[int, int], path: Union[str, Path]) -> Path:
    """Write a histogram as CSV with columns distance,count"""
    path = Path(path)
    frame = pd.DataFrame({"distance": list(histogram.keys()), "count": list(histogram.values())})
    frame.to_csv(path, index=False)
    return path
