"""
Module: runner
Description: Resumable scaling scan - one ScalingRecord per (cell, replicate),
appended to a versioned CSV in a deterministic order
"""

import io
import logging
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import pandas as pd
from tqdm import tqdm

from ..analysis.boxes import box_side, empty_box_scan
from ..analysis.graph import Graph, build, diameter, max_degree
from ..analysis.walk import mixing_time, spectral_gap
from ..generation.edge_list import EdgeList
from ..generation.generator import generate
from ..model.params import ModelParams
from ..utils.exceptions import MNWError, ParameterError, ResourceCapError
from ..utils.parallel import parallel_imap
from .experiment_config import ExperimentCell, ExperimentConfig, Measurement

logger = logging.getLogger(__name__)

RECORDS_HEADER = "# mnw-records v1"
TIMING_COLUMNS = ("wall_clock_s",)


@dataclass
class ScalingRecord:
    """
    Measurements of one replicate of one cell

    Exactness flags are False whenever the value came from a sampled mode
    (sampled diameter, sampled mixing starts), in which case it is a lower bound.
    """
    cell_id: str
    replicate: int
    seed: int
    d: int
    n: int
    alpha: float
    beta: float
    sigma: float
    zeta: float
    p_n: float
    gamma: float
    long_edges: Optional[int] = None
    diameter: Optional[int] = None
    diameter_exact: Optional[bool] = None
    diameter_method: Optional[str] = None
    t_mix: Optional[int] = None
    t_mix_exact: Optional[bool] = None
    spectral_gap: Optional[float] = None
    gap_method: Optional[str] = None
    max_degree: Optional[int] = None
    box_side: Optional[int] = None
    empty_boxes: Optional[int] = None
    skipped: Optional[str] = None
    wall_clock_s: Optional[float] = None

    @property
    def key(self) -> Tuple[str, int]:
        return self.cell_id, self.replicate

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


RECORD_COLUMNS = [f.name for f in fields(ScalingRecord)]
_INT_COLUMNS = {"replicate", "seed", "d", "n", "long_edges", "diameter", "t_mix", "max_degree",
                "box_side", "empty_boxes"}
_FLOAT_COLUMNS = {"alpha", "beta", "sigma", "zeta", "p_n", "gamma", "spectral_gap", "wall_clock_s"}
_BOOL_COLUMNS = {"diameter_exact", "t_mix_exact"}


def _measure_diameter(g: Graph, edges: EdgeList, config: ExperimentConfig, record: ScalingRecord) -> None:
    if g.vertex_count <= config.caps.exact_diameter_max_vertices:
        result = diameter(g, mode="exact", threads=1)
    else:
        result = diameter(g, mode="sampled", samples=config.caps.diameter_samples, seed=record.seed, threads=1)
    record.diameter, record.diameter_exact, record.diameter_method = result.value, result.exact, result.method


def _measure_mixing(g: Graph, edges: EdgeList, config: ExperimentConfig, record: ScalingRecord) -> None:
    caps = config.caps
    if g.vertex_count <= caps.exact_mixing_max_vertices:
        result = mixing_time(g, starts="all", threads=1)
    elif g.vertex_count <= caps.sampled_mixing_max_vertices:
        result = mixing_time(g, starts="sample", samples=caps.mixing_starts, seed=record.seed, threads=1)
    else:
        raise ResourceCapError("sampled_mixing_max_vertices", caps.sampled_mixing_max_vertices, g.vertex_count)
    record.t_mix, record.t_mix_exact = result.t_mix, result.exact


def _measure_gap(g: Graph, edges: EdgeList, config: ExperimentConfig, record: ScalingRecord) -> None:
    caps = config.caps
    if g.vertex_count > caps.gap_max_vertices:
        raise ResourceCapError("gap_max_vertices", caps.gap_max_vertices, g.vertex_count)
    method = "power" if g.vertex_count <= caps.power_gap_max_vertices else "lanczos"
    record.spectral_gap = spectral_gap(g, seed=record.seed, method=method)
    record.gap_method = method


def _measure_max_degree(g: Graph, edges: EdgeList, config: ExperimentConfig, record: ScalingRecord) -> None:
    record.max_degree = max_degree(g)


def _measure_boxes(g: Graph, edges: EdgeList, config: ExperimentConfig, record: ScalingRecord) -> None:
    record.box_side = box_side(edges.n, config.box_r)
    record.empty_boxes = len(empty_box_scan(edges, config.box_r))


_MEASURERS: Dict[Measurement, Callable[[Graph, EdgeList, ExperimentConfig, ScalingRecord], None]] = {
    Measurement.DIAMETER: _measure_diameter,
    Measurement.MIXING: _measure_mixing,
    Measurement.GAP: _measure_gap,
    Measurement.MAX_DEGREE: _measure_max_degree,
    Measurement.BOXES: _measure_boxes,
}


def measure_params(
    params: ModelParams, config: ExperimentConfig, cell_id: str = "", replicate: int = 0
) -> ScalingRecord:
    """
    Generate the graph for params (its seed included) and run the configured measurements

    In lenient mode a measurement that hits a cap (or cannot run for the cell,
    e.g. a box side >= n) is recorded in `skipped`; in strict mode it raises.
    """
    started = time.perf_counter()
    record = ScalingRecord(
        cell_id=cell_id, replicate=replicate, seed=params.seed,
        d=params.d, n=params.n, alpha=params.alpha, beta=params.beta,
        sigma=params.sigma, zeta=params.zeta, p_n=params.p_n, gamma=params.gamma,
    )
    edges = generate(params, threads=1)
    g = build(edges)
    record.long_edges = edges.long_edge_count

    skips = []
    for measurement in config.measurements:
        try:
            _MEASURERS[measurement](g, edges, config, record)
        except MNWError as e:
            if config.strict:
                logger.error(f"Strict scan aborted at {cell_id} replicate {replicate}: {e}")
                raise
            logger.warning(f"Skipping {measurement.value} for {cell_id} replicate {replicate}: {e}")
            skips.append(f"{measurement.value}: {e}")
    record.skipped = "; ".join(skips) or None
    record.wall_clock_s = round(time.perf_counter() - started, 6)
    return record


def measure_replicate(config: ExperimentConfig, cell: ExperimentCell, replicate: int) -> ScalingRecord:
    """One replicate of a cell, seeded from (config.seed, cell_id, replicate)"""
    params = cell.params.with_seed(config.replicate_seed(cell.cell_id, replicate))
    return measure_params(params, config, cell.cell_id, replicate)


def _parse(column: str, value: str) -> Any:
    if value == "":
        return None
    if column in _INT_COLUMNS:
        return int(value)
    if column in _FLOAT_COLUMNS:
        return float(value)
    if column in _BOOL_COLUMNS:
        return value == "True"
    return value


def _complete_text(path: Path) -> str:
    """File contents up to the last newline; an unterminated final row is an interrupted append"""
    text = path.read_text()
    if text and not text.endswith("\n"):
        cut = text.rfind("\n") + 1
        logger.warning(f"Ignoring interrupted final row in {path}: {text[cut:][:60]!r}")
        text = text[:cut]
    return text


def read_records(path: Union[str, Path]) -> List[ScalingRecord]:
    """
    Read a records CSV written by run_scan

    A final row without its line terminator (a write cut short) is ignored.

    Raises:
        ParameterError: When the file does not carry the records header
    """
    path = Path(path)
    text = _complete_text(path)
    if text.split("\n", 1)[0] != RECORDS_HEADER:
        raise ParameterError(f"{path} is not a records file (expected '{RECORDS_HEADER}')")
    frame = pd.read_csv(io.StringIO(text), comment="#", dtype=str, keep_default_na=False)
    missing = set(RECORD_COLUMNS) - set(frame.columns)
    if missing:
        raise ParameterError(f"{path} is missing columns {sorted(missing)}")
    return [
        ScalingRecord(**{column: _parse(column, row[column]) for column in RECORD_COLUMNS})
        for row in frame.to_dict(orient="records")
    ]


def records_frame(records: List[ScalingRecord]) -> pd.DataFrame:
    """Records as a DataFrame with the frozen column order"""
    return pd.DataFrame([r.to_dict() for r in records], columns=RECORD_COLUMNS)


def _append(handle, record: ScalingRecord) -> None:
    records_frame([record]).to_csv(handle, header=False, index=False, lineterminator="\n")
    handle.flush()


def run_scan(
    config: ExperimentConfig,
    out: Optional[Union[str, Path]] = None,
    threads: Optional[int] = None,
    progress: bool = False,
) -> List[ScalingRecord]:
    """
    Run every (cell, replicate) of the config

    Replicates run concurrently but records are written in grid order, one
    complete line at a time. If `out` already holds records, their
    (cell_id, replicate) pairs are skipped, so an interrupted scan resumes.

    Args:
        config: Experiment definition
        out: Records CSV (defaults to config.output.records; None keeps results in memory)
        threads: Worker threads; records do not depend on it
        progress: Show a tqdm progress bar

    Returns:
        Records for every (cell, replicate), in grid order
    """
    try:
        jobs = [(cell, r) for cell in config.cells() for r in range(config.replicates)]
        out = out if out is not None else config.output.records
        done: Dict[Tuple[str, int], ScalingRecord] = {}
        path = Path(out) if out is not None else None
        header_block = RECORDS_HEADER + "\n" + ",".join(RECORD_COLUMNS) + "\n"
        if path is not None and path.exists() and path.stat().st_size > 0:
            raw = path.read_text()
            if header_block.startswith(raw) and raw != header_block:
                logger.warning(f"Records header in {path} was cut short; starting it again")
                path.write_text("")
            else:
                done = {record.key: record for record in read_records(path)}
                if not raw.endswith("\n"):
                    path.write_text(raw[:raw.rfind("\n") + 1])
                logger.info(f"Resuming scan: {len(done)} records already in {path}")
        pending = [(cell, r) for cell, r in jobs if (cell.cell_id, r) not in done]
        logger.info(f"Scan: {len(jobs)} jobs, {len(pending)} pending")

        handle = None
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            fresh = not path.exists() or path.stat().st_size == 0
            handle = path.open("a")
            if fresh:
                handle.write(header_block)
                handle.flush()
        try:
            results = parallel_imap(lambda job: measure_replicate(config, *job), pending, threads)
            for record in tqdm(results, total=len(pending), disable=not progress, desc="scan"):
                done[record.key] = record
                if handle is not None:
                    _append(handle, record)
                logger.debug(f"Finished {record.cell_id} replicate {record.replicate}")
        finally:
            if handle is not None:
                handle.close()

        return [done[(cell.cell_id, r)] for cell, r in jobs if (cell.cell_id, r) in done]

    except Exception as e:
        logger.error(f"Error in run_scan: {e}")
        raise
