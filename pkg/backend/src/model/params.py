"""
Module: params
Description: Validated parameter set (d, n, alpha, beta, sigma, zeta, seed) of the
modified Newman-Watts graph and the quantities derived from it
"""

import logging
import math
from typing import Any, Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..utils.exceptions import ParameterError

logger = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1


class ModelParams(BaseModel):
    """
    Parameters of G_n(alpha, beta, sigma, zeta) on the d-dimensional torus of side n

    Long edges join pairs at torus l-infinity distance in [alpha*n, beta*n], each
    independently with probability p_n = sigma * n^-d * ln^zeta(n).

    Attributes:
        d: Dimension of the torus
        n: Side length (>= 3)
        alpha: Lower annulus radius as a fraction of n
        beta: Upper annulus radius as a fraction of n (alpha < beta < 1/2)
        sigma: Intensity (0 gives the pure torus)
        zeta: Power of ln n in p_n
        seed: 64-bit unsigned seed
    """

    model_config = ConfigDict(frozen=True)

    d: int = Field(..., ge=1)
    n: int = Field(..., ge=3)
    alpha: float = Field(..., gt=0.0, lt=0.5)
    beta: float = Field(..., gt=0.0, lt=0.5)
    sigma: float = Field(..., ge=0.0)
    zeta: float = 0.0
    seed: int = Field(0, ge=0, le=MAX_SEED)

    @model_validator(mode="after")
    def _check_window_and_probability(self) -> "ModelParams":
        if not self.alpha < self.beta:
            raise ValueError(f"alpha must be < beta, got alpha={self.alpha}, beta={self.beta}")
        if not 0.0 <= self.p_n <= 1.0:
            raise ValueError(
                f"derived p_n={self.p_n:.6g} outside [0, 1] "
                f"(sigma={self.sigma}, n={self.n}, d={self.d}, zeta={self.zeta})"
            )
        return self

    @classmethod
    def create(cls, **kwargs: Any) -> "ModelParams":
        """
        Build ModelParams, converting validation failures to ParameterError

        Raises:
            ParameterError: When any invariant is violated
        """
        try:
            return cls(**kwargs)
        except ValidationError as e:
            logger.error(f"Invalid model parameters {kwargs}: {e}")
            raise ParameterError(str(e)) from e

    @property
    def vertex_count(self) -> int:
        return self.n**self.d

    @property
    def p_n(self) -> float:
        return self.sigma * self.n ** (-self.d) * math.log(self.n) ** self.zeta

    @property
    def gamma(self) -> float:
        """Asymptotic annulus fraction (2 beta)^d - (2 alpha)^d"""
        return (2 * self.beta) ** self.d - (2 * self.alpha) ** self.d

    @property
    def gamma_gt_half(self) -> bool:
        return self.gamma > 0.5

    @property
    def window(self) -> Tuple[int, int]:
        """Integer distance window [ceil(alpha n), floor(beta n)]"""
        return math.ceil(self.alpha * self.n), math.floor(self.beta * self.n)

    def with_seed(self, seed: int) -> "ModelParams":
        return self.model_copy(update={"seed": seed})

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation including derived quantities"""
        result = self.model_dump()
        result["p_n"] = self.p_n
        result["gamma"] = self.gamma
        result["gamma_gt_half"] = self.gamma_gt_half
        return result
