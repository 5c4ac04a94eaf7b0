"""
Module: large_deviations
Description: Binomial rate functions, exact log-space tails and a grid checker
for the Cramer-type tail inequalities used throughout the model's estimates
"""

import itertools
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp, rel_entr
from scipy.stats import binom

from ..utils.exceptions import ParameterError, ResourceCapError

logger = logging.getLogger(__name__)

MAX_EXACT_TAIL_TRIALS = 10**5
# small-p form is only claimed for small p
SMALL_P_ASSERT_MAX = 0.01
CHECK_TOL = 1e-9

GridPoint = Tuple[int, float, float]


def _check_unit_interval(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ParameterError(f"{name} must lie in (0, 1), got {value}")


def rate_I(z: float, p: float) -> float:
    """
    Binomial large-deviation rate I(z) = z ln(zq / ((1-z)p)) - ln(q / (1-z))

    Args:
        z: Fraction of successes, in (0, 1)
        p: Success probability, in (0, 1)

    Returns:
        I(z) >= 0, zero only at z = p

    Raises:
        ParameterError: When z or p lies outside (0, 1)
    """
    _check_unit_interval("z", z)
    _check_unit_interval("p", p)
    q = 1.0 - p
    return z * math.log(z * q / ((1.0 - z) * p)) - math.log(q / (1.0 - z))


def bernoulli_relative_entropy(z: float, p: float) -> float:
    """Relative entropy of Bernoulli(z) to Bernoulli(p)"""
    _check_unit_interval("z", z)
    _check_unit_interval("p", p)
    return float(rel_entr(z, p) + rel_entr(1.0 - z, 1.0 - p))


def gamma_rate(z: float) -> float:
    """
    Small-p rate gamma(z) = z ln z - z + 1

    Raises:
        ParameterError: When z <= 0
    """
    if z <= 0:
        raise ParameterError(f"gamma rate needs z > 0, got {z}")
    return z * math.log(z) - z + 1.0


@lru_cache(maxsize=None)
def large_z_threshold() -> float:
    """Smallest z > 1 with gamma(z) >= z, where exp(-z p n) follows from the gamma bound"""
    return float(brentq(lambda z: gamma_rate(z) - z, math.e, 10.0))


def _check_trials(n: int) -> None:
    if n < 0:
        raise ParameterError(f"trial count must be >= 0, got {n}")
    if n > MAX_EXACT_TAIL_TRIALS:
        raise ResourceCapError("max_exact_tail_trials", MAX_EXACT_TAIL_TRIALS, n)


def log_binomial_tail(n: int, p: float, threshold: float, side: str = "upper") -> float:
    """
    ln P(Z >= threshold) (upper) or ln P(Z <= threshold) (lower) for Z ~ Binomial(n, p)

    The tail is summed in log space so it stays finite far below float underflow.
    Returns -inf for an empty tail.
    """
    _check_trials(n)
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    if side == "upper":
        k = max(0, math.ceil(threshold - CHECK_TOL))
        ks = np.arange(k, n + 1)
    elif side == "lower":
        k = min(n, math.floor(threshold + CHECK_TOL))
        ks = np.arange(0, k + 1)
    else:
        raise ParameterError(f"side must be 'upper' or 'lower', got {side!r}")
    if len(ks) == 0:
        return -math.inf
    return float(min(0.0, logsumexp(binom.logpmf(ks, n, p))))


def binomial_tail(n: int, p: float, z: float, side: str = "upper") -> float:
    """
    Exact tail P(Z >= zn) or P(Z <= zn) for Z ~ Binomial(n, p)

    Args:
        n: Number of trials (<= 10^5)
        p: Success probability
        z: Threshold as a fraction of n
        side: "upper" or "lower"

    Returns:
        Tail probability

    Raises:
        ResourceCapError: When n exceeds the exact-summation cap
    """
    return math.exp(log_binomial_tail(n, p, z * n, side))


@dataclass
class BoundCheck:
    """
    One tail inequality evaluated at one grid point

    Attributes:
        form: "cramer", "small_p" or "large_z"
        n, p, z: Grid point
        side: Tail side
        log_tail: ln of the exact tail
        log_bound: ln of the claimed bound
        holds: log_tail <= log_bound (with tolerance)
        asserted: Whether the form is claimed at this point (else report only)
    """
    form: str
    n: int
    p: float
    z: float
    side: str
    log_tail: float
    log_bound: float
    holds: bool
    asserted: bool

    def to_dict(self) -> Dict[str, Any]:
        result = asdict(self)
        if math.isinf(self.log_tail):
            result["log_tail"] = None
        return result


@dataclass
class LDCheckReport:
    """Violation report over a (n, p, z) grid"""
    checks: List[BoundCheck] = field(default_factory=list)

    @property
    def violations(self) -> List[BoundCheck]:
        """Failures at points where the inequality is claimed"""
        return [c for c in self.checks if c.asserted and not c.holds]

    @property
    def reported(self) -> List[BoundCheck]:
        """Failures outside the claimed range (informational)"""
        return [c for c in self.checks if not c.asserted and not c.holds]

    def to_dict(self) -> Dict[str, Any]:
        by_form: Dict[str, Dict[str, int]] = {}
        for check in self.checks:
            counts = by_form.setdefault(check.form, {"evaluated": 0, "asserted": 0, "violations": 0, "reported": 0})
            counts["evaluated"] += 1
            counts["asserted"] += int(check.asserted)
            counts["violations"] += int(check.asserted and not check.holds)
            counts["reported"] += int(not check.asserted and not check.holds)
        return {
            "summary": by_form,
            "violations": [c.to_dict() for c in self.violations],
            "reported": [c.to_dict() for c in self.reported],
        }


def _holds(log_tail: float, log_bound: float) -> bool:
    return log_tail <= log_bound + CHECK_TOL * max(1.0, abs(log_bound))


def _expand_grid(grid: Union[Mapping[str, Sequence[float]], Iterable[GridPoint]]) -> List[GridPoint]:
    if isinstance(grid, Mapping):
        try:
            axes = [grid["n"], grid["p"], grid["z"]]
        except KeyError as e:
            raise ParameterError(f"grid mapping is missing axis {e}") from e
        return [(int(n), float(p), float(z)) for n, p, z in itertools.product(*axes)]
    return [(int(n), float(p), float(z)) for n, p, z in grid]


def _point_checks(n: int, p: float, z: float) -> List[BoundCheck]:
    checks = []
    if 0.0 < z < 1.0 and 0.0 < p < 1.0 and z != p:
        side = "upper" if z > p else "lower"
        log_tail = log_binomial_tail(n, p, z * n, side)
        log_bound = -rate_I(z, p) * n
        checks.append(BoundCheck("cramer", n, p, z, side, log_tail, log_bound,
                                 _holds(log_tail, log_bound), True))

    if z > 0 and z != 1.0 and 0.0 < p < 1.0:
        mean = p * n
        if z > 1.0:
            side, log_bound = "upper", -gamma_rate(z) * mean
        else:
            side, log_bound = "lower", -0.5 * gamma_rate(z) * mean
        log_tail = log_binomial_tail(n, p, z * mean, side)
        checks.append(BoundCheck("small_p", n, p, z, side, log_tail, log_bound,
                                 _holds(log_tail, log_bound), p <= SMALL_P_ASSERT_MAX))

        if z > 1.0:
            log_bound = -z * mean
            checks.append(BoundCheck("large_z", n, p, z, "upper", log_tail, log_bound,
                                     _holds(log_tail, log_bound), z >= large_z_threshold()))
    return checks


def check_ld_bounds(grid: Union[Mapping[str, Sequence[float]], Iterable[GridPoint]]) -> LDCheckReport:
    """
    Evaluate the tail inequalities against exact binomial tails over a grid

    Forms, with Z ~ Binomial(n, p):
      cramer:  P(Z >= zn) <= exp(-I(z) n) for z > p, P(Z <= zn) likewise for z < p
               (z in (0, 1); always asserted)
      small_p: P(Z >= zpn) <= exp(-gamma(z) pn) for z > 1,
               P(Z <= zpn) <= exp(-gamma(z) pn / 2) for 0 < z < 1
               (asserted for p <= 0.01, reported otherwise)
      large_z: P(Z >= zpn) <= exp(-zpn) (asserted once gamma(z) >= z, reported below)

    Args:
        grid: {"n": [...], "p": [...], "z": [...]} (Cartesian product) or (n, p, z) triples

    Returns:
        LDCheckReport
    """
    try:
        report = LDCheckReport()
        points = _expand_grid(grid)
        for n, p, z in points:
            report.checks.extend(_point_checks(n, p, z))
        logger.info(
            f"Checked {len(report.checks)} inequalities over {len(points)} grid points: "
            f"{len(report.violations)} violations, {len(report.reported)} reported"
        )
        for check in report.reported:
            logger.debug(f"Outside claimed range: {check.form} at n={check.n}, p={check.p}, z={check.z}")
        return report

    except Exception as e:
        logger.error(f"Error in check_ld_bounds: {e}")
        raise


def write_report(report: Any, path: Union[str, Path]) -> Path:
    """Write any report with a to_dict() method as indented JSON"""
    path = Path(path)
    path.write_text(json.dumps(report.to_dict(), indent=2))
    return path
