"""
Module: regimes
Description: Which asymptotic regime a parameter cell falls in and the polylog
exponents predicted there
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from ..model.params import ModelParams


@dataclass
class RegimePrediction:
    """
    Predicted growth exponents in ln n

    Attributes:
        regime: "sublinear" (0 <= zeta < 1), "critical" (zeta = 1) or "superlinear" (zeta > 1)
        gamma_gt_half: Gamma > 1/2, required by both upper bounds
        needs_large_sigma: The upper bound only holds for sigma large enough (zeta in {0, 1})
        diameter_upper: diam <= C ln^k n
        diameter_lower: diam >= ln^nu n for every nu below this value
        tmix_upper: T_mix <= C ln^k n
        tmix_lower: T_mix >= ln^nu n for every nu below this value
        max_degree: Delta = O(ln^k n)
        notes: Caveats for this cell
    """
    regime: str
    gamma_gt_half: bool
    needs_large_sigma: bool
    diameter_upper: Optional[float]
    diameter_lower: Optional[float]
    tmix_upper: Optional[float]
    tmix_lower: Optional[float]
    max_degree: float
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def predicted_regime(params: ModelParams) -> RegimePrediction:
    """
    Polylog exponents predicted for a parameter cell

    Upper bounds (Gamma > 1/2): diameter ln^3 n and T_mix ln^5 n for 0 < zeta < 1
    (or zeta = 0 with large sigma); diameter ln^2 n and T_mix ln n for zeta > 1 (or
    zeta = 1 with large sigma); none for zeta < 0. Lower bounds for zeta < 1 and sigma > 0: diameter
    exponent (1 - zeta)/d and T_mix exponent 2(1 - zeta)/d. Maximum degree grows
    like ln^(zeta v 1) n.
    """
    zeta, d = params.zeta, params.d
    notes = []
    if zeta < 1:
        regime, upper = "sublinear", (3.0, 5.0)
    elif zeta == 1:
        regime, upper = "critical", (2.0, 1.0)
    else:
        regime, upper = "superlinear", (2.0, 1.0)
    needs_large_sigma = zeta in (0.0, 1.0)
    if needs_large_sigma:
        notes.append("upper bounds need sigma large enough")
    if zeta < 0:
        notes.append("zeta < 0: no upper bound predicted")
        upper = (None, None)
    if not params.gamma_gt_half:
        notes.append(f"Gamma = {params.gamma:.4g} <= 1/2: no upper bound predicted")
        upper = (None, None)

    if zeta < 1 and params.sigma > 0:
        lower = ((1.0 - zeta) / d, 2.0 * (1.0 - zeta) / d)
    else:
        lower = (None, None)
    if params.sigma == 0:
        notes.append("sigma = 0: pure torus, diameter d * floor(n/2)")

    return RegimePrediction(
        regime=regime,
        gamma_gt_half=params.gamma_gt_half,
        needs_large_sigma=needs_large_sigma,
        diameter_upper=upper[0],
        diameter_lower=lower[0],
        tmix_upper=upper[1],
        tmix_lower=lower[1],
        max_degree=max(zeta, 1.0),
        notes=notes,
    )
