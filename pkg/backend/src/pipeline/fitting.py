"""
Module: fitting
Description: Polylog exponent fits - least squares of ln(median response) on
ln ln n with a within-n bootstrap confidence interval
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from sklearn.linear_model import LinearRegression
from sklearn.metrics import r2_score

from ..generation import rng
from ..model.params import ModelParams
from ..utils.exceptions import InsufficientDataError, ParameterError
from .regimes import predicted_regime
from .runner import ScalingRecord, records_frame

logger = logging.getLogger(__name__)

RESPONSE_COLUMNS = {"diameter": "diameter", "tmix": "t_mix"}
MIN_N_VALUES = 4
MIN_REPLICATES = 5


@dataclass
class PolylogFit:
    """
    Fitted law response ~ C ln^slope n

    Attributes:
        response: "diameter" or "tmix"
        slope: Fitted polylog exponent
        intercept: ln C
        ci_low, ci_high: Bootstrap percentile interval for the slope
        r2: Coefficient of determination of the median fit
        n_values: Distinct n used
        medians: Median response per n
        replicates: Replicates per n
        all_exact: Whether every response used was exact (else some are lower bounds)
        resamples: Bootstrap resamples
        predicted: Regime prediction when the records share one parameter cell shape
    """
    response: str
    slope: float
    intercept: float
    ci_low: float
    ci_high: float
    r2: float
    n_values: List[int]
    medians: List[float]
    replicates: List[int]
    all_exact: bool
    resamples: int
    predicted: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _as_frame(records: Union[pd.DataFrame, Sequence[ScalingRecord]]) -> pd.DataFrame:
    if isinstance(records, pd.DataFrame):
        return records
    return records_frame(list(records))


def _prediction(frame: pd.DataFrame) -> Optional[Dict[str, Any]]:
    columns = ["d", "alpha", "beta", "sigma", "zeta"]
    if any(c not in frame for c in columns):
        return None
    shape = frame[columns].drop_duplicates()
    if len(shape) != 1:
        return None
    row = shape.iloc[0]
    params = ModelParams.create(d=int(row["d"]), n=int(frame["n"].min()), alpha=float(row["alpha"]),
                                beta=float(row["beta"]), sigma=float(row["sigma"]), zeta=float(row["zeta"]))
    return predicted_regime(params).to_dict()


def fit_polylog_exponent(
    records: Union[pd.DataFrame, Sequence[ScalingRecord]],
    response: str = "diameter",
    resamples: int = 1000,
    confidence: float = 0.95,
    seed: int = 0,
) -> PolylogFit:
    """
    Fit ln(median response) = ln C + slope * ln ln n

    Args:
        records: ScalingRecords or a records DataFrame
        response: "diameter" or "tmix"
        resamples: Bootstrap resamples (replicates resampled within each n)
        confidence: Two-sided interval level
        seed: Bootstrap seed

    Returns:
        PolylogFit

    Raises:
        InsufficientDataError: Fewer than 4 distinct n or fewer than 5 replicates at some n
        ParameterError: Unknown response or nonpositive medians
    """
    try:
        if response not in RESPONSE_COLUMNS:
            raise ParameterError(f"response must be one of {sorted(RESPONSE_COLUMNS)}, got {response!r}")
        column = RESPONSE_COLUMNS[response]
        frame = _as_frame(records)
        frame = frame[frame[column].notna()] if column in frame else frame.iloc[0:0]
        if frame.empty:
            raise InsufficientDataError(f"no {response} values in the records")

        groups = {int(n): g[column].astype(float).to_numpy() for n, g in frame.groupby("n")}
        n_values = sorted(groups)
        if len(n_values) < MIN_N_VALUES:
            raise InsufficientDataError(f"need >= {MIN_N_VALUES} distinct n values, got {len(n_values)}")
        thin = [n for n in n_values if len(groups[n]) < MIN_REPLICATES]
        if thin:
            raise InsufficientDataError(f"need >= {MIN_REPLICATES} replicates per n; too few at n={thin}")
        if min(n_values) < 3:
            raise ParameterError("n must be >= 3 so that ln ln n is defined")

        medians = np.array([np.median(groups[n]) for n in n_values])
        if (medians <= 0).any():
            raise ParameterError(f"medians must be positive for a log fit, got {medians.tolist()}")
        X = np.log(np.log(np.asarray(n_values, dtype=float))).reshape(-1, 1)
        y = np.log(medians)

        model = LinearRegression()
        model.fit(X, y)
        r2 = float(r2_score(y, model.predict(X)))

        gen = rng.stream(seed, rng.STREAM_BOOTSTRAP)
        boot = np.empty((resamples, len(n_values)))
        for j, n in enumerate(n_values):
            values = groups[n]
            picks = gen.integers(0, len(values), size=(resamples, len(values)))
            boot[:, j] = np.median(values[picks], axis=1)
        if (boot <= 0).any():
            raise ParameterError("bootstrap medians must be positive for a log fit")
        boot_model = LinearRegression()
        boot_model.fit(X, np.log(boot).T)
        slopes = boot_model.coef_[:, 0]
        tail = 100.0 * (1.0 - confidence) / 2.0
        ci_low, ci_high = np.percentile(slopes, [tail, 100.0 - tail])

        exact_column = "diameter_exact" if response == "diameter" else "t_mix_exact"
        all_exact = bool(frame[exact_column].fillna(False).astype(bool).all()) if exact_column in frame else True
        if not all_exact:
            logger.warning(f"Some {response} values are sampled-mode lower bounds")

        fit = PolylogFit(
            response=response,
            slope=float(model.coef_[0]),
            intercept=float(model.intercept_),
            ci_low=float(ci_low),
            ci_high=float(ci_high),
            r2=r2,
            n_values=n_values,
            medians=[float(m) for m in medians],
            replicates=[len(groups[n]) for n in n_values],
            all_exact=all_exact,
            resamples=resamples,
            predicted=_prediction(frame),
        )
        logger.info(f"{response} ~ ln^{fit.slope:.3f} n (CI [{fit.ci_low:.3f}, {fit.ci_high:.3f}], r2={r2:.3f})")
        return fit

    except Exception as e:
        logger.error(f"Error in fit_polylog_exponent: {e}")
        raise

