"""
Module: walk
Description: Lazy random walk on a sampled graph - kernel, stationary law, total
variation, mixing time and spectral gap

The kernel is P(u,u) = 1/2, P(u,v) = 1/(2 deg u) for v ~ u. It is reversible
with respect to pi(u) = deg(u) / D and its spectrum lies in [0, 1].
"""

import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.sparse import diags
from scipy.sparse.linalg import eigsh

from ..generation import rng
from ..utils.exceptions import ConvergenceError, ParameterError, ResourceCapError
from ..utils.parallel import parallel_map
from ..utils.settings import get_settings
from .graph import Graph, double_sweep

logger = logging.getLogger(__name__)

MIXING_THRESHOLD = 1.0 / math.e
NORMALIZATION_TOL = 1e-12
# dense eigensolve below this many vertices, Lanczos above
DENSE_EIGEN_MAX_VERTICES = 2048
# max probability cells evolved together in one block of starts
EVOLUTION_BLOCK_CELLS = 1 << 22


@dataclass
class StationaryDistribution:
    """
    Stationary law of the lazy walk

    Attributes:
        pi: pi(u) = degree(u) / total_degree
        total_degree: D, the degree sum
    """
    pi: np.ndarray
    total_degree: int

    @property
    def pi_min(self) -> float:
        return float(self.pi.min())


@dataclass
class MixingResult:
    """
    Measured mixing time

    Attributes:
        t_mix: First t with worst evaluated TV below 1/e
        exact: True when every start was evaluated (t_mix is T_mix); otherwise a lower bound
        starts_evaluated: "all" or the list of evaluated starts
        worst_start: Start with the largest TV at t_mix - 1
        tv_at_t_mix: Worst evaluated TV at t_mix
        tv_before: Worst evaluated TV at t_mix - 1 (None when t_mix = 0)
        method: "bisect" or "linear"
    """
    t_mix: int
    exact: bool
    starts_evaluated: Union[str, List[int]]
    worst_start: int
    tv_at_t_mix: float
    tv_before: Optional[float]
    method: str

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def stationary_distribution(g: Graph) -> StationaryDistribution:
    total = int(g.degrees.sum())
    return StationaryDistribution(g.degrees / float(total), total)


def kernel_step(g: Graph, mu: np.ndarray) -> np.ndarray:
    """
    One lazy step nu = mu P

    Args:
        g: Graph
        mu: Distribution of shape (V,) or a block of distributions of shape (V, k)

    Returns:
        nu(v) = mu(v)/2 + sum_{u ~ v} mu(u) / (2 deg u)

    Raises:
        ParameterError: On a dimension mismatch
    """
    mu = np.asarray(mu, dtype=np.float64)
    if mu.shape[0] != g.vertex_count:
        raise ParameterError(f"distribution has {mu.shape[0]} entries, graph has {g.vertex_count}")
    weights = g.degrees if mu.ndim == 1 else g.degrees[:, None]
    return 0.5 * mu + 0.5 * (g.adjacency @ (mu / weights))


def tv_distance(mu: np.ndarray, nu: np.ndarray) -> float:
    """Total variation distance, half the l1 difference"""
    mu = np.asarray(mu, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    if mu.shape != nu.shape:
        raise ParameterError(f"shape mismatch {mu.shape} vs {nu.shape}")
    return float(0.5 * np.abs(mu - nu).sum())


def _column_tv(block: np.ndarray, pi: np.ndarray) -> np.ndarray:
    return 0.5 * np.abs(block - pi[:, None]).sum(axis=0)


def _advance(g: Graph, block: np.ndarray, steps: int) -> np.ndarray:
    every = get_settings().renormalize_every
    for step in range(1, steps + 1):
        block = kernel_step(g, block)
        if step % every == 0:
            mass = block.sum(axis=0)
            drift = float(np.abs(mass - 1.0).max())
            if drift > NORMALIZATION_TOL:
                logger.debug(f"Renormalising after {step} steps, mass drift {drift:.3e}")
            block = block / mass
    return block


def _point_masses(g: Graph, starts: np.ndarray) -> np.ndarray:
    block = np.zeros((g.vertex_count, len(starts)))
    block[starts, np.arange(len(starts))] = 1.0
    return block


def _check_cap(t: int, cap: int) -> None:
    if t > cap:
        raise ConvergenceError("max_mixing_steps", cap, f"worst-start TV still >= 1/e at t={t}")


def _bisect_block(g: Graph, starts: np.ndarray, pi: np.ndarray, cap: int) -> Tuple[int, np.ndarray, np.ndarray]:
    lo_state = _point_masses(g, starts)
    lo_tv = _column_tv(lo_state, pi)
    if lo_tv.max() < MIXING_THRESHOLD:
        return 0, lo_tv, lo_tv
    lo, t = 0, 1
    state = _advance(g, lo_state, 1)
    tv = _column_tv(state, pi)
    while tv.max() >= MIXING_THRESHOLD:
        lo, lo_state, lo_tv = t, state, tv
        _check_cap(2 * t, cap)
        state = _advance(g, state, t)
        t *= 2
        tv = _column_tv(state, pi)
    hi, hi_tv = t, tv
    while hi - lo > 1:
        mid = (lo + hi) // 2
        state = _advance(g, lo_state, mid - lo)
        tv = _column_tv(state, pi)
        if tv.max() < MIXING_THRESHOLD:
            hi, hi_tv = mid, tv
        else:
            lo, lo_state, lo_tv = mid, state, tv
    return hi, hi_tv, lo_tv


def _linear_block(g: Graph, starts: np.ndarray, pi: np.ndarray, cap: int) -> Tuple[int, np.ndarray, np.ndarray]:
    state = _point_masses(g, starts)
    tv = _column_tv(state, pi)
    previous = tv
    t = 0
    while tv.max() >= MIXING_THRESHOLD:
        _check_cap(t + 1, cap)
        previous = tv
        state = _advance(g, state, 1)
        t += 1
        tv = _column_tv(state, pi)
        if tv.max() > previous.max() + 1e-12:
            logger.warning(f"Worst-start TV increased at t={t}: {previous.max():.6g} -> {tv.max():.6g}")
    return t, tv, previous


def _tv_around(g: Graph, starts: np.ndarray, pi: np.ndarray, t: int) -> Tuple[np.ndarray, np.ndarray]:
    """TV of every start at t and at t - 1"""
    before = _advance(g, _point_masses(g, starts), max(t - 1, 0))
    tv_before = _column_tv(before, pi)
    if t == 0:
        return tv_before, tv_before
    return _column_tv(_advance(g, before, 1), pi), tv_before


def _select_starts(
    g: Graph, starts: Union[str, Sequence[int]], samples: Optional[int], seed: int
) -> Tuple[np.ndarray, bool]:
    settings = get_settings()
    if isinstance(starts, str):
        if starts == "all":
            if g.vertex_count > settings.max_exact_mixing_vertices:
                raise ResourceCapError("max_exact_mixing_vertices", settings.max_exact_mixing_vertices,
                                       g.vertex_count)
            return np.arange(g.vertex_count, dtype=np.int64), True
        if starts == "sample":
            k = min(samples or settings.sampled_starts, g.vertex_count)
            chosen = rng.stream(seed, rng.STREAM_SOURCES).choice(g.vertex_count, size=k, replace=False)
            _, adversarial, _ = double_sweep(g)
            picked = np.unique(np.append(chosen, adversarial)).astype(np.int64)
            return picked, len(picked) == g.vertex_count
        raise ParameterError(f"unknown starts mode {starts!r}")
    picked = np.unique(np.asarray(list(starts), dtype=np.int64))
    if len(picked) == 0 or picked[0] < 0 or picked[-1] >= g.vertex_count:
        raise ParameterError("explicit starts must be nonempty and in range")
    return picked, len(picked) == g.vertex_count


def mixing_time(
    g: Graph,
    starts: Union[str, Sequence[int]] = "all",
    samples: Optional[int] = None,
    seed: int = 0,
    search: str = "bisect",
    threads: Optional[int] = None,
) -> MixingResult:
    """
    Mixing time min{t : max_u ||P^t(u,.) - pi||_TV < 1/e}

    TV to stationarity from a fixed start never increases in t, so the search
    doubles t until the worst evaluated start is below 1/e and then bisects.

    Args:
        g: Graph
        starts: "all" (exact T_mix), "sample" (seeded random starts plus the
            double-sweep endpoint, a lower bound) or an explicit list of starts
        samples: Number of random starts in "sample" mode (Settings.sampled_starts)
        seed: Seed for the sampled starts
        search: "bisect" or "linear"
        threads: Worker threads; results do not depend on it

    Returns:
        MixingResult

    Raises:
        ResourceCapError: When "all" is requested above Settings.max_exact_mixing_vertices
        ConvergenceError: When t would exceed Settings.max_mixing_steps
    """
    try:
        if search not in ("bisect", "linear"):
            raise ParameterError(f"unknown search {search!r}")
        picked, exact = _select_starts(g, starts, samples, seed)
        pi = stationary_distribution(g).pi
        cap = get_settings().max_mixing_steps
        block_size = max(1, EVOLUTION_BLOCK_CELLS // g.vertex_count)
        blocks = [picked[i:i + block_size] for i in range(0, len(picked), block_size)]
        runner = _bisect_block if search == "bisect" else _linear_block
        outcomes = parallel_map(lambda block: runner(g, block, pi, cap), blocks, threads)

        # blocks that mixed earlier are re-evaluated at the global t_mix
        t_mix = max(outcome[0] for outcome in outcomes)
        pairs = parallel_map(
            lambda i: outcomes[i][1:] if outcomes[i][0] == t_mix else _tv_around(g, blocks[i], pi, t_mix),
            range(len(blocks)),
            threads,
        )
        tv_at = np.concatenate([pair[0] for pair in pairs])
        tv_before = np.concatenate([pair[1] for pair in pairs])
        result = MixingResult(
            t_mix=int(t_mix),
            exact=exact,
            starts_evaluated="all" if exact else [int(s) for s in picked],
            worst_start=int(picked[int(np.argmax(tv_before))]),
            tv_at_t_mix=float(tv_at.max()),
            tv_before=float(tv_before.max()) if t_mix > 0 else None,
            method=search,
        )
        label = "T_mix" if exact else "T_mix lower bound"
        logger.info(f"{label} = {result.t_mix} over {len(picked)} starts ({search})")
        return result

    except Exception as e:
        logger.error(f"Error in mixing_time: {e}")
        raise


def tv_curve(g: Graph, start: int, t_max: int) -> List[Tuple[int, float]]:
    """TV distance to stationarity from start for t = 0..t_max"""
    if not 0 <= start < g.vertex_count:
        raise ParameterError(f"start {start} out of range")
    pi = stationary_distribution(g).pi
    mu = np.zeros(g.vertex_count)
    mu[start] = 1.0
    curve = [(0, tv_distance(mu, pi))]
    for t in range(1, t_max + 1):
        mu = kernel_step(g, mu)
        curve.append((t, tv_distance(mu, pi)))
    return curve


def write_tv_curve(curve: List[Tuple[int, float]], path: Union[str, Path]) -> Path:
    """Write a TV curve as CSV with columns t,tv"""
    path = Path(path)
    pd.DataFrame(curve, columns=["t", "tv"]).to_csv(path, index=False)
    return path


def dense_kernel(g: Graph) -> np.ndarray:
    """Dense lazy transition matrix (small graphs only)"""
    if g.vertex_count > DENSE_EIGEN_MAX_VERTICES:
        raise ResourceCapError("dense_eigen_max_vertices", DENSE_EIGEN_MAX_VERTICES, g.vertex_count)
    return 0.5 * np.eye(g.vertex_count) + 0.5 * g.adjacency.toarray() / g.degrees[:, None]


def _symmetric_kernel(g: Graph):
    inv_sqrt = diags(1.0 / np.sqrt(g.degrees))
    half = diags(np.full(g.vertex_count, 0.5))
    return (half + 0.5 * (inv_sqrt @ g.adjacency @ inv_sqrt)).tocsr()


def spectral_gap(
    g: Graph,
    tol: float = 1e-9,
    seed: int = 0,
    method: str = "power",
    max_iterations: Optional[int] = None,
) -> float:
    """
    Spectral gap 1 - lambda_1 of the lazy kernel

    Power iteration runs on the symmetrised kernel D^1/2 P D^-1/2 (self-adjoint
    because P is reversible), projecting out the stationary direction sqrt(deg)
    every iteration. The spectrum is nonnegative, so the dominant remaining
    eigenvalue is lambda_1.

    Args:
        g: Graph
        tol: Rayleigh-quotient stabilisation tolerance, relative to the gap
        seed: Seed for the start vector
        method: "power", "lanczos" or "dense"
        max_iterations: Iteration cap (Settings.max_power_iterations)

    Returns:
        1 - lambda_1

    Raises:
        ConvergenceError: When the power iteration cap is exceeded
    """
    if method in ("dense", "lanczos"):
        lam, _ = second_eigenpair(g, method=method)
        return 1.0 - lam
    if method != "power":
        raise ParameterError(f"unknown spectral method {method!r}")
    if g.vertex_count == 1:
        return 1.0

    cap = max_iterations or get_settings().max_power_iterations
    kernel = _symmetric_kernel(g)
    phi0 = np.sqrt(g.degrees / g.degrees.sum())

    x = rng.stream(seed, rng.STREAM_SPECTRAL).standard_normal(g.vertex_count)
    x -= phi0 * (phi0 @ x)
    x /= np.linalg.norm(x)
    previous = None
    for iteration in range(1, cap + 1):
        y = kernel @ x
        y -= phi0 * (phi0 @ y)
        rho = float(x @ y)
        norm = float(np.linalg.norm(y))
        if norm <= 1e-14:
            logger.debug(f"Power iteration collapsed at iteration {iteration}; lambda_1 = 0")
            return 1.0 - max(rho, 0.0)
        x = y / norm
        if previous is not None and abs(rho - previous) <= tol * max(1.0 - rho, tol):
            logger.debug(f"Power iteration converged in {iteration} iterations, lambda_1={rho:.12g}")
            return 1.0 - rho
        previous = rho
    raise ConvergenceError("max_power_iterations", cap, f"lambda_1 estimate {previous}")


def second_eigenpair(g: Graph, method: str = "auto") -> Tuple[float, np.ndarray]:
    """
    lambda_1 and its eigenvector in vertex coordinates, D^-1/2 phi_1

    Args:
        g: Graph
        method: "dense", "lanczos" or "auto" (dense up to 2048 vertices)

    Returns:
        (lambda_1, vector ordering the vertices for a sweep cut)
    """
    if method == "auto":
        method = "dense" if g.vertex_count <= DENSE_EIGEN_MAX_VERTICES else "lanczos"
    if g.vertex_count == 1:
        return 0.0, np.zeros(1)
    kernel = _symmetric_kernel(g)
    if method == "dense":
        values, vectors = np.linalg.eigh(kernel.toarray())
        lam, phi = float(values[-2]), vectors[:, -2]
    elif method == "lanczos":
        values, vectors = eigsh(kernel, k=2, which="LA")
        order = np.argsort(values)
        lam, phi = float(values[order[0]]), vectors[:, order[0]]
    else:
        raise ParameterError(f"unknown eigen method {method!r}")
    return lam, phi / np.sqrt(g.degrees)


def upper_bound_tmix(g: Graph, gap: Optional[float] = None) -> Tuple[float, float]:
    """
    The relaxation-time bound T_mix <= ln(e / pi_min) / (1 - lambda_1)

    Args:
        g: Graph
        gap: Precomputed spectral gap (computed by power iteration when None)

    Returns:
        (bound, pi_min)
    """
    if gap is None:
        gap = spectral_gap(g)
    pi_min = stationary_distribution(g).pi_min
    return math.log(math.e / pi_min) / gap, pi_min
