"""
Module: experiment_config
Description: Experiment grid definition loaded from TOML, JSON or YAML files
"""

import itertools
import json
import logging
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..generation import rng
from ..model.params import MAX_SEED, ModelParams
from ..utils.exceptions import ParameterError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)


class Measurement(str, Enum):
    """Quantities a scan can measure per replicate"""
    DIAMETER = "diameter"
    MIXING = "mixing"
    GAP = "gap"
    MAX_DEGREE = "max_degree"
    BOXES = "boxes"


class ParameterGrid(BaseModel):
    """Lists of parameter values; cells are their Cartesian product"""
    model_config = ConfigDict(extra="forbid")

    d: List[int] = Field(default_factory=lambda: [1])
    n: List[int] = Field(default_factory=list)
    alpha: List[float] = Field(default_factory=list)
    beta: List[float] = Field(default_factory=list)
    sigma: List[float] = Field(default_factory=list)
    zeta: List[float] = Field(default_factory=lambda: [0.0])


class MeasurementCaps(BaseModel):
    """
    Vertex caps per measurement mode

    Attributes:
        exact_diameter_max_vertices: iFUB above this switches to sampled diameter
        exact_mixing_max_vertices: All-starts T_mix above this switches to sampled starts
        sampled_mixing_max_vertices: No mixing measurement at all above this
        power_gap_max_vertices: Power iteration up to this size, Lanczos above
        gap_max_vertices: No gap measurement above this
        diameter_samples: Sources for sampled diameter
        mixing_starts: Random starts for sampled mixing
    """
    model_config = ConfigDict(extra="forbid")

    exact_diameter_max_vertices: int = Field(1 << 20, ge=1)
    exact_mixing_max_vertices: int = Field(4096, ge=1)
    sampled_mixing_max_vertices: int = Field(1 << 16, ge=1)
    power_gap_max_vertices: int = Field(4096, ge=1)
    gap_max_vertices: int = Field(1 << 20, ge=1)
    diameter_samples: int = Field(32, ge=1)
    mixing_starts: int = Field(32, ge=1)


class OutputPaths(BaseModel):
    model_config = ConfigDict(extra="forbid")

    records: Optional[str] = None
    fit: Optional[str] = None


class ExperimentCell(BaseModel):
    """One grid point; replicate seeds are derived from cell_id"""
    model_config = ConfigDict(frozen=True)

    cell_id: str
    params: ModelParams


class ExperimentConfig(BaseModel):
    """
    Scaling experiment

    Attributes:
        grid: Parameter lists
        replicates: Replicates per cell
        seed: Base seed
        measurements: Quantities measured per replicate
        box_r: Box exponent r for the boxes measurement
        caps: Per-mode vertex caps
        output: Output paths
        strict: Resource-cap violations abort the scan instead of being recorded as skips
    """
    model_config = ConfigDict(extra="forbid")

    grid: ParameterGrid = Field(default_factory=ParameterGrid)
    replicates: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, le=MAX_SEED)
    measurements: List[Measurement] = Field(
        default_factory=lambda: [Measurement.DIAMETER, Measurement.MAX_DEGREE]
    )
    box_r: float = Field(0.5, gt=0.0)
    caps: MeasurementCaps = Field(default_factory=MeasurementCaps)
    output: OutputPaths = Field(default_factory=OutputPaths)
    strict: bool = False

    @model_validator(mode="after")
    def _check_cells(self) -> "ExperimentConfig":
        for values in self._combinations():
            try:
                ModelParams(**values)
            except ValidationError as e:
                raise ValueError(f"invalid cell {values}: {e}") from e
        return self

    def _combinations(self) -> Iterator[Dict[str, Any]]:
        g = self.grid
        for d, n, alpha, beta, sigma, zeta in itertools.product(g.d, g.n, g.alpha, g.beta, g.sigma, g.zeta):
            yield {"d": d, "n": n, "alpha": alpha, "beta": beta, "sigma": sigma, "zeta": zeta}

    def cells(self) -> List[ExperimentCell]:
        """Grid cells in a fixed order (d, n, alpha, beta, sigma, zeta)"""
        cells = []
        for values in self._combinations():
            cell_id = "_".join(f"{key}={values[key]!r}" for key in ("d", "n", "alpha", "beta", "sigma", "zeta"))
            cells.append(ExperimentCell(cell_id=cell_id, params=ModelParams(**values)))
        return cells

    def replicate_seed(self, cell_id: str, replicate: int) -> int:
        """Deterministic per-replicate seed, independent of scheduling"""
        return rng.derive_seed(self.seed, cell_id, replicate)

    @classmethod
    def create(cls, **kwargs: Any) -> "ExperimentConfig":
        """
        Build a config, converting validation failures to ParameterError

        Raises:
            ParameterError: When the config or any cell is invalid
        """
        try:
            return cls(**kwargs)
        except ValidationError as e:
            logger.error(f"Invalid experiment config: {e}")
            raise ParameterError(str(e)) from e


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Parse a TOML, JSON or YAML file by extension

    Raises:
        ParameterError: For unknown extensions or unparsable content
    """
    path = Path(path)
    suffix = path.suffix.lower()
    try:
        if suffix == ".toml":
            with path.open("rb") as f:
                return tomllib.load(f)
        if suffix == ".json":
            return json.loads(path.read_text())
        if suffix in (".yaml", ".yml"):
            return yaml.safe_load(path.read_text()) or {}
    except (tomllib.TOMLDecodeError, json.JSONDecodeError, yaml.YAMLError) as e:
        logger.error(f"Could not parse {path}: {e}")
        raise ParameterError(f"could not parse {path}: {e}") from e
    raise ParameterError(f"unsupported config extension {suffix!r} (use .toml, .json, .yaml)")


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Load an ExperimentConfig from a TOML, JSON or YAML file"""
    config = ExperimentConfig.create(**read_config_file(path))
    logger.info(f"Loaded experiment config from {path}: {len(config.cells())} cells x {config.replicates} replicates")
    return config
