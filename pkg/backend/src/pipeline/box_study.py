"""
Module: box_study
Description: Monte Carlo frequency of an empty box across seeds
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

from ..analysis.boxes import box_side, empty_box_scan, expected_empty_boxes
from ..generation import rng
from ..generation.generator import generate
from ..model.params import ModelParams
from ..utils.exceptions import ParameterError
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)


@dataclass
class BoxFrequency:
    """
    Attributes:
        frequency: Fraction of trials with at least one empty box
        hits: Trials with at least one empty box
        trials: Number of trials
        side: Box side ceil(2 ln^r n)
        expected_disjoint_empty: Expected empty boxes among the disjoint tiling
    """
    frequency: float
    hits: int
    trials: int
    side: int
    expected_disjoint_empty: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def empty_box_frequency(
    params: ModelParams, r: float, trials: int, threads: Optional[int] = None
) -> BoxFrequency:
    """
    Fraction of seeds whose graph has a box with no crossing long edge

    Trial t uses the seed derived from (params.seed, "boxes", t).

    Raises:
        ParameterError: When r <= 0, trials < 1 or the box side is >= n
    """
    if r <= 0:
        raise ParameterError(f"box exponent r must be > 0, got {r}")
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    side = box_side(params.n, r)

    def has_empty_box(trial: int) -> bool:
        edges = generate(params.with_seed(rng.derive_seed(params.seed, "boxes", trial)), threads=1)
        return len(empty_box_scan(edges, r)) > 0

    hits = sum(parallel_map(has_empty_box, range(trials), threads))
    result = BoxFrequency(hits / trials, hits, trials, side, expected_empty_boxes(params, r))
    logger.info(
        f"Empty box (side {side}) in {hits}/{trials} trials at n={params.n}; "
        f"expected disjoint empty boxes {result.expected_disjoint_empty:.3g}"
    )
    return result
