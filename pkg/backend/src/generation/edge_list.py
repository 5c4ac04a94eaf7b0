"""
Module: edge_list
Description: EdgeList - the sampled long edges of one graph realisation
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..model.params import ModelParams
from ..model.torus import torus_distances
from ..utils.exceptions import GraphFormatError

logger = logging.getLogger(__name__)


class ModelKind(Enum):
    """Which random-graph model produced the edges"""
    MODIFIED = "mnw"
    ORIGINAL = "nw"


@dataclass
class EdgeList:
    """
    Long edges of one realisation; torus edges are implied by (d, n)

    Attributes:
        kind: Producing model
        d: Torus dimension
        n: Torus side
        long_edges: (m, 2) int64 array of pairs (u, v) with u < v, sorted
        params: Model parameters (modified model only)
        seed: Seed the realisation was drawn with
        shortcut_mean: Poisson mean p per vertex (original model only)
        raw_stub_count: Shortcut stubs before collapsing to a simple graph (original model only)
    """
    kind: ModelKind
    d: int
    n: int
    long_edges: np.ndarray
    params: Optional[ModelParams] = None
    seed: int = 0
    shortcut_mean: Optional[float] = None
    raw_stub_count: Optional[int] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def vertex_count(self) -> int:
        return self.n**self.d

    @property
    def torus_edge_count(self) -> int:
        return self.d * self.vertex_count

    @property
    def long_edge_count(self) -> int:
        return int(len(self.long_edges))

    def pairs(self) -> List[Tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.long_edges]

    def validate(self) -> None:
        """
        Check the simple-graph and window invariants

        Raises:
            GraphFormatError: On self-loops, duplicates, unordered pairs,
                out-of-range ids or (modified model) out-of-window distances
        """
        edges = np.asarray(self.long_edges, dtype=np.int64).reshape(-1, 2)
        if len(edges) == 0:
            return
        u, v = edges[:, 0], edges[:, 1]
        if (u < 0).any() or (v >= self.vertex_count).any():
            raise GraphFormatError("long edge endpoint out of range")
        if (u >= v).any():
            raise GraphFormatError("long edges must satisfy u < v (no self-loops)")
        codes = u * self.vertex_count + v
        if len(np.unique(codes)) != len(codes):
            raise GraphFormatError("duplicate long edge")
        if self.kind is ModelKind.MODIFIED and self.params is not None:
            lo, hi = self.params.window
            dist = torus_distances(u, v, self.d, self.n)
            if ((dist < lo) | (dist > hi)).any():
                raise GraphFormatError(f"long edge outside eligible window [{lo}, {hi}]")

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a JSON-friendly summary"""
        return {
            "kind": self.kind.value,
            "d": self.d,
            "n": self.n,
            "seed": self.seed,
            "params": self.params.to_dict() if self.params else None,
            "torus_edge_count": self.torus_edge_count,
            "long_edge_count": self.long_edge_count,
            "shortcut_mean": self.shortcut_mean,
            "raw_stub_count": self.raw_stub_count,
        }


def normalise_pairs(u: np.ndarray, v: np.ndarray, vertex_count: int) -> np.ndarray:
    """Unique sorted (min, max) pairs as an (m, 2) array"""
    lo = np.minimum(u, v).astype(np.int64)
    hi = np.maximum(u, v).astype(np.int64)
    codes = np.unique(lo * vertex_count + hi)
    return np.stack([codes // vertex_count, codes % vertex_count], axis=1)
