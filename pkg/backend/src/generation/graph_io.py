"""
Module: graph_io
Description: Versioned text format for sampled graphs

Modified model:  `mnw v1 d n alpha beta sigma zeta seed`
Original model:  `nw v1 n p seed raw_stub_count`
followed by one `u v` line per long edge (u < v). Torus edges are implied by the
header and rebuilt on load.
"""

import logging
from pathlib import Path
from typing import List, Union

import numpy as np

from ..model.params import ModelParams
from ..utils.exceptions import GraphFormatError
from .edge_list import EdgeList, ModelKind

logger = logging.getLogger(__name__)

FORMAT_VERSION = "v1"

PathLike = Union[str, Path]


def format_header(edges: EdgeList) -> str:
    if edges.kind is ModelKind.MODIFIED:
        p = edges.params
        return (
            f"mnw {FORMAT_VERSION} {p.d} {p.n} {p.alpha!r} {p.beta!r} "
            f"{p.sigma!r} {p.zeta!r} {p.seed}"
        )
    return f"nw {FORMAT_VERSION} {edges.n} {edges.shortcut_mean!r} {edges.seed} {edges.raw_stub_count}"


def write_edge_list(edges: EdgeList, path: PathLike) -> Path:
    """
    Write an EdgeList in the versioned text format

    Args:
        edges: Realisation to write
        path: Output file

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines: List[str] = [format_header(edges)]
    lines.extend(f"{u} {v}" for u, v in edges.pairs())
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Wrote {edges.long_edge_count} long edges to {path}")
    return path


def _parse_header(tokens: List[str]) -> EdgeList:
    tag = tokens[0] if tokens else ""
    if len(tokens) < 2 or tokens[1] != FORMAT_VERSION:
        raise GraphFormatError(f"unsupported header {' '.join(tokens)!r}")
    empty = np.empty((0, 2), dtype=np.int64)
    if tag == "mnw" and len(tokens) == 9:
        d, n, alpha, beta, sigma, zeta, seed = tokens[2:]
        params = ModelParams.create(
            d=int(d), n=int(n), alpha=float(alpha), beta=float(beta),
            sigma=float(sigma), zeta=float(zeta), seed=int(seed),
        )
        return EdgeList(ModelKind.MODIFIED, params.d, params.n, empty, params, params.seed)
    if tag == "nw" and len(tokens) == 6:
        n, p, seed, stubs = tokens[2:]
        return EdgeList(
            ModelKind.ORIGINAL, 1, int(n), empty, None, int(seed),
            shortcut_mean=float(p), raw_stub_count=int(stubs),
        )
    raise GraphFormatError(f"malformed header {' '.join(tokens)!r}")


def read_edge_list(path: PathLike) -> EdgeList:
    """
    Read an EdgeList written by write_edge_list

    Raises:
        GraphFormatError: On a bad header, malformed edge lines or invalid edges
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
        if not lines:
            raise GraphFormatError(f"{path} is empty")
        edges = _parse_header(lines[0].split())
        body = [line.split() for line in lines[1:] if line.strip()]
        if any(len(row) != 2 for row in body):
            raise GraphFormatError(f"{path}: every edge line must hold two vertex ids")
        pairs = np.asarray(body, dtype=np.int64).reshape(-1, 2)
        edges.long_edges = pairs
        edges.validate()
        logger.info(f"Read {len(pairs)} long edges from {path}")
        return edges
    except GraphFormatError as e:
        logger.error(f"Error reading {path}: {e}")
        raise
    except ValueError as e:
        logger.error(f"Error reading {path}: {e}")
        raise GraphFormatError(f"{path}: {e}") from e
