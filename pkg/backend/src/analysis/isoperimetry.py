"""
Module: isoperimetry
Description: Conductance h and edge isoperimetric constant iota - exact subset
enumeration, spectral sweep-cut bracket, and the inequality checks tying them to
the diameter, the spectral gap and the mixing time

  h    = 1/2 min_{S : pi(S) <= 1/2} E(S, S^c) / Vol(S)
  iota =     min_{S : |S| <= |V|/2} E(S, S^c) / |S|
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..utils.exceptions import ParameterError, ResourceCapError
from ..utils.parallel import parallel_map
from ..utils.settings import get_settings
from .graph import Graph, diameter, max_degree, subset_from_mask
from .walk import mixing_time, second_eigenpair, upper_bound_tmix

logger = logging.getLogger(__name__)

CONDUCTANCE = "conductance"
ISOPERIMETRIC = "isoperimetric"
CHECK_TOL = 1e-9
MASK_BLOCK = 1 << 16


@dataclass
class IsoperimetryResult:
    """
    Conductance or isoperimetric constant

    Attributes:
        quantity: "conductance" (h) or "isoperimetric" (iota)
        value: The constant (exact) or an upper bound on it (sweep)
        method: "brute", "gray" or "sweep"
        exact: True for enumeration methods
        bound: "exact" or "upper"
        subset: Minimising (or best sweep) subset, ascending
        cut: E(S, S^c) of that subset
        denominator: Vol(S) for conductance, |S| for iota
        lower: Certified lower bound (sweep only: (1 - lambda_1) / 2)
    """
    quantity: str
    value: float
    method: str
    exact: bool
    bound: str
    subset: List[int]
    cut: int
    denominator: int
    lower: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def edge_array(g: Graph) -> np.ndarray:
    """(|E|, 2) array of edges with u < v"""
    sources = g.entry_sources
    keep = sources < g.indices
    return np.stack([sources[keep], g.indices[keep]], axis=1)


def _check_cap(g: Graph) -> None:
    cap = get_settings().max_brute_force_vertices
    if g.vertex_count > cap:
        raise ResourceCapError("max_brute_force_vertices", cap, g.vertex_count)
    if g.vertex_count < 2:
        raise ParameterError("subset enumeration needs at least two vertices")


def _scan_block(
    start: int, stop: int, edges: np.ndarray, weights: np.ndarray, limit: int
) -> Optional[Tuple[int, int, int]]:
    """Best (cut, denominator, mask) over masks in [start, stop) with 2 * denominator <= limit"""
    masks = np.arange(start, stop, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(len(weights), dtype=np.int64)) & 1).astype(np.int8)
    cuts = (bits[:, edges[:, 0]] != bits[:, edges[:, 1]]).sum(axis=1)
    denominators = bits.astype(np.int64) @ weights
    feasible = (denominators > 0) & (2 * denominators <= limit)
    if not feasible.any():
        return None
    ratios = np.where(feasible, cuts / np.maximum(denominators, 1), np.inf)
    best = int(np.argmin(ratios))
    return int(cuts[best]), int(denominators[best]), int(masks[best])


def _better(candidate: Tuple[int, int, int], incumbent: Optional[Tuple[int, int, int]]) -> bool:
    if incumbent is None:
        return True
    cut, den, mask = candidate
    best_cut, best_den, best_mask = incumbent
    lhs, rhs = cut * best_den, best_cut * den
    return lhs < rhs or (lhs == rhs and mask < best_mask)


def _result(g: Graph, quantity: str, method: str, best: Tuple[int, int, int]) -> IsoperimetryResult:
    cut, den, mask = best
    ratio = cut / den
    return IsoperimetryResult(
        quantity=quantity,
        value=0.5 * ratio if quantity == CONDUCTANCE else ratio,
        method=method,
        exact=True,
        bound="exact",
        subset=[int(v) for v in subset_from_mask(mask, g.vertex_count)],
        cut=cut,
        denominator=den,
    )


def _weights(g: Graph, quantity: str) -> Tuple[np.ndarray, int]:
    if quantity == CONDUCTANCE:
        return g.degrees.astype(np.int64), int(g.degrees.sum())
    if quantity == ISOPERIMETRIC:
        return np.ones(g.vertex_count, dtype=np.int64), g.vertex_count
    raise ParameterError(f"unknown quantity {quantity!r}")


def _brute_force(g: Graph, quantity: str, threads: Optional[int]) -> IsoperimetryResult:
    _check_cap(g)
    weights, limit = _weights(g, quantity)
    edges = edge_array(g)
    total = 1 << g.vertex_count
    blocks = [(lo, min(lo + MASK_BLOCK, total)) for lo in range(1, total, MASK_BLOCK)]
    partials = parallel_map(lambda b: _scan_block(b[0], b[1], edges, weights, limit), blocks, threads)

    best = None
    for partial in partials:
        if partial is not None and _better(partial, best):
            best = partial
    result = _result(g, quantity, "brute", best)
    logger.info(f"Exact {quantity} = {result.value:.6g} over {total - 1} subsets")
    return result


def conductance_exact(g: Graph, threads: Optional[int] = None) -> IsoperimetryResult:
    """
    Exact conductance h by enumeration of every subset

    Masks are split into blocks scanned in parallel and min-reduced in block
    order; ties go to the smallest mask, so the minimiser is deterministic.

    Raises:
        ResourceCapError: When |V| exceeds Settings.max_brute_force_vertices
    """
    return _brute_force(g, CONDUCTANCE, threads)


def isoperimetric_exact(g: Graph, threads: Optional[int] = None) -> IsoperimetryResult:
    """
    Exact edge isoperimetric constant iota by enumeration of every subset

    Raises:
        ResourceCapError: When |V| exceeds Settings.max_brute_force_vertices
    """
    return _brute_force(g, ISOPERIMETRIC, threads)


def gray_code_minimum(g: Graph, quantity: str = CONDUCTANCE) -> IsoperimetryResult:
    """
    Independent enumerator walking subsets in Gray-code order

    Consecutive subsets differ in one vertex, so the cut is updated from that
    vertex's neighbours only. Ratios are compared exactly by cross-multiplication.
    """
    _check_cap(g)
    weights, limit = _weights(g, quantity)
    neighbours = [g.neighbors(u).tolist() for u in range(g.vertex_count)]
    weight = weights.tolist()
    inside = [False] * g.vertex_count
    cut = den = mask = 0
    best = None
    for i in range(1, 1 << g.vertex_count):
        v = (i & -i).bit_length() - 1
        for w in neighbours[v]:
            cut += 1 if inside[w] == inside[v] else -1
        inside[v] = not inside[v]
        den += weight[v] if inside[v] else -weight[v]
        mask ^= 1 << v
        if 0 < den and 2 * den <= limit and _better((cut, den, mask), best):
            best = (cut, den, mask)
    return _result(g, quantity, "gray", best)


def conductance_sweep(g: Graph, quantity: str = CONDUCTANCE) -> IsoperimetryResult:
    """
    Sweep-cut upper bound from the second eigenvector ordering

    Vertices are ordered by D^-1/2 phi_1; for each prefix the side satisfying the
    constraint is scored. For conductance the result brackets h between
    (1 - lambda_1) / 2 and the best sweep ratio.

    Returns:
        IsoperimetryResult with bound "upper" (and lower for conductance)
    """
    try:
        if g.vertex_count < 2:
            raise ParameterError("sweep needs at least two vertices")
        weights, limit = _weights(g, quantity)
        lam, vector = second_eigenpair(g)
        order = np.argsort(vector, kind="stable")
        position = np.empty(g.vertex_count, dtype=np.int64)
        position[order] = np.arange(g.vertex_count)

        edges = edge_array(g)
        first = np.minimum(position[edges[:, 0]], position[edges[:, 1]])
        last = np.maximum(position[edges[:, 0]], position[edges[:, 1]])
        # prefix of length k cuts an edge iff first < k <= last
        delta = np.zeros(g.vertex_count + 1, dtype=np.int64)
        np.add.at(delta, first + 1, 1)
        np.add.at(delta, last + 1, -1)
        cuts = np.cumsum(delta)[1:g.vertex_count]
        prefix = np.cumsum(weights[order])[:g.vertex_count - 1]
        small_side = np.where(2 * prefix <= limit, prefix, limit - prefix)
        ratios = cuts / small_side
        k = int(np.argmin(ratios))

        members = order[:k + 1] if 2 * prefix[k] <= limit else order[k + 1:]
        ratio = float(ratios[k])
        value = 0.5 * ratio if quantity == CONDUCTANCE else ratio
        lower = None
        if quantity == CONDUCTANCE:
            lower = (1.0 - lam) / 2.0
            if lower > value + CHECK_TOL:
                logger.warning(f"Sweep bracket inverted: lower {lower:.12g} > upper {value:.12g}")
            lower = min(lower, value)
        logger.info(f"Sweep {quantity} bound {value:.6g}" + (f", lower {lower:.6g}" if lower is not None else ""))
        return IsoperimetryResult(
            quantity=quantity,
            value=value,
            method="sweep",
            exact=False,
            bound="upper",
            subset=sorted(int(v) for v in members),
            cut=int(cuts[k]),
            denominator=int(small_side[k]),
            lower=lower,
        )

    except Exception as e:
        logger.error(f"Error in conductance_sweep: {e}")
        raise


@dataclass
class InequalityReport:
    """
    An inequality lhs <= rhs evaluated on one graph

    Attributes:
        name: "diameter", "cheeger_lower", "cheeger_upper" or "mixing"
        lhs: Left-hand side
        rhs: Right-hand side
        holds: lhs <= rhs within tolerance
        details: Ingredients of both sides
    """
    name: str
    lhs: float
    rhs: float
    holds: bool
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _leq(lhs: float, rhs: float) -> bool:
    return lhs <= rhs + CHECK_TOL * max(1.0, abs(rhs))


def diameter_bound_check(g: Graph, iota: Optional[float] = None) -> InequalityReport:
    """
    diam(G) <= 4 Delta / iota * ln |V|

    Args:
        g: Graph
        iota: Exact iota or a certified lower bound on it (computed exactly when None)
    """
    if iota is None:
        iota = isoperimetric_exact(g).value
    if iota <= 0:
        raise ParameterError("iota must be positive (graph disconnected?)")
    diam = diameter(g).value
    delta = max_degree(g)
    rhs = 4.0 * delta / iota * math.log(g.vertex_count)
    report = InequalityReport("diameter", float(diam), rhs, _leq(diam, rhs),
                              {"diameter": diam, "max_degree": delta, "iota": iota, "vertices": g.vertex_count})
    logger.info(f"Diameter bound: {diam} <= {rhs:.6g}: {report.holds}")
    return report


def cheeger_check(g: Graph, h: Optional[float] = None, gap: Optional[float] = None) -> List[InequalityReport]:
    """
    h^2 / 2 <= 1 - lambda_1 <= 2h with exact h and a dense eigensolve gap

    Returns:
        [lower-side report, upper-side report]
    """
    if h is None:
        h = conductance_exact(g).value
    if gap is None:
        lam, _ = second_eigenpair(g, method="dense")
        gap = 1.0 - lam
    details = {"h": h, "gap": gap}
    reports = [
        InequalityReport("cheeger_lower", h * h / 2.0, gap, _leq(h * h / 2.0, gap), details),
        InequalityReport("cheeger_upper", gap, 2.0 * h, _leq(gap, 2.0 * h), details),
    ]
    logger.info(f"Cheeger sandwich h={h:.6g}, gap={gap:.6g}: {all(r.holds for r in reports)}")
    return reports


def mixing_bound_check(g: Graph, gap: Optional[float] = None) -> InequalityReport:
    """Exact T_mix <= ln(e / pi_min) / (1 - lambda_1)"""
    if gap is None:
        lam, _ = second_eigenpair(g, method="dense")
        gap = 1.0 - lam
    measured = mixing_time(g, starts="all")
    bound, pi_min = upper_bound_tmix(g, gap)
    report = InequalityReport("mixing", float(measured.t_mix), bound, _leq(measured.t_mix, bound),
                              {"t_mix": measured.t_mix, "gap": gap, "pi_min": pi_min})
    logger.info(f"Mixing bound: {measured.t_mix} <= {bound:.6g}: {report.holds}")
    return report


def exact_ratio(result: IsoperimetryResult) -> Fraction:
    """The minimum ratio as an exact fraction (h is half of it)"""
    ratio = Fraction(result.cut, result.denominator)
    return ratio / 2 if result.quantity == CONDUCTANCE else ratio
