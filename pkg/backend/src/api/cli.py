"""
Module: cli
Description: `mnw` command line - generate graphs, measure them, check the
inequalities, run scans and fit exponents

Exit codes: 0 success, 2 invalid input (bad flags, parameters or files),
3 resource cap or iteration cap hit in strict mode. In lenient mode a capped
measurement prints a skip record and exits 0.
"""

import functools
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import click

from ..analysis import boxes as box_scan
from ..analysis import isoperimetry
from ..analysis.graph import Graph, build, diameter as measure_diameter, distance_histogram, write_distance_histogram
from ..analysis.large_deviations import check_ld_bounds
from ..analysis.walk import mixing_time, second_eigenpair, spectral_gap, tv_curve, upper_bound_tmix, write_tv_curve
from ..generation.generator import generate, generate_original_nw, generate_reference
from ..generation.graph_io import read_edge_list, write_edge_list
from ..model.params import ModelParams
from ..pipeline.box_study import empty_box_frequency
from ..pipeline.experiment_config import load_config, read_config_file
from ..pipeline.fitting import fit_polylog_exponent
from ..pipeline.runner import read_records, run_scan
from ..utils.exceptions import (
    ConvergenceError,
    GraphFormatError,
    InsufficientDataError,
    ParameterError,
    ResourceCapError,
)
from ..utils.logging_config import configure_logging
from ..utils.settings import get_settings

logger = logging.getLogger(__name__)

EXIT_INVALID = 2
EXIT_CAPPED = 3
MODEL_KEYS = ("d", "n", "alpha", "beta", "sigma", "zeta", "seed")


def _emit(payload: Dict[str, Any], out: Optional[str] = None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
        logger.info(f"Wrote {out}")
    click.echo(text)


def _strict(ctx: click.Context) -> bool:
    return bool(ctx.find_root().obj.get("strict", False))


def _threads(ctx: click.Context) -> Optional[int]:
    return ctx.find_root().obj.get("threads")


def handle_errors(func: Callable) -> Callable:
    """Map package errors to exit codes"""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except (ParameterError, GraphFormatError, InsufficientDataError) as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(EXIT_INVALID)
        except (ResourceCapError, ConvergenceError) as e:
            if _strict(ctx):
                click.echo(f"Error: {e}", err=True)
                ctx.exit(EXIT_CAPPED)
            logger.warning(f"Skipped: {e}")
            click.echo(json.dumps({"skipped": str(e), "cap": e.cap_name, "cap_value": e.cap_value}))

    return wrapper


def _load_graph(path: str) -> Graph:
    return build(read_edge_list(path))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--threads", type=click.IntRange(min=1), default=None,
              help="Worker threads (default MNW_THREADS); never changes results")
@click.option("--strict/--lenient", default=None, help="Exit 3 on resource caps instead of skipping")
@click.option("--log-level", default=None, help="Log level (default MNW_LOG_LEVEL)")
@click.option("--log-json", is_flag=True, default=None, help="JSON log lines")
@click.pass_context
def cli(ctx: click.Context, threads: Optional[int], strict: Optional[bool],
        log_level: Optional[str], log_json: Optional[bool]) -> None:
    """Modified Newman-Watts small world on the d-dimensional torus"""
    configure_logging(log_level, log_json)
    settings = get_settings()
    ctx.obj = {
        "threads": threads,
        "strict": settings.strict if strict is None else strict,
    }


@cli.command(name="generate")
@click.option("--params", "params_file", type=click.Path(exists=True, dir_okay=False),
              help="TOML/JSON/YAML file with model parameters; flags override it")
@click.option("--model", type=click.Choice(["mnw", "nw"]), default="mnw", show_default=True)
@click.option("--d", type=int)
@click.option("--n", type=int)
@click.option("--alpha", type=float)
@click.option("--beta", type=float)
@click.option("--sigma", type=float)
@click.option("--zeta", type=float)
@click.option("--p", "shortcut_mean", type=float, help="Poisson shortcut mean per vertex (nw model)")
@click.option("--seed", type=click.IntRange(min=0), default=None)
@click.option("--reference", is_flag=True, help="Use the per-pair reference sampler (small n)")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Graph file to write")
@click.pass_context
@handle_errors
def generate_cmd(ctx: click.Context, params_file: Optional[str], model: str, shortcut_mean: Optional[float],
                 reference: bool, out: str, **flags: Any) -> None:
    """Sample a graph and write it in the mnw v1 / nw v1 format"""
    values: Dict[str, Any] = {}
    if params_file:
        raw = read_config_file(params_file)
        values.update(raw.get("model", raw))
    values.update({k: v for k, v in flags.items() if v is not None})

    if model == "nw":
        if "n" not in values or shortcut_mean is None:
            raise ParameterError("the nw model needs --n and --p")
        edges = generate_original_nw(int(values["n"]), shortcut_mean, int(values.get("seed", 0)))
    else:
        params = ModelParams.create(**{k: values[k] for k in MODEL_KEYS if k in values})
        edges = generate_reference(params) if reference else generate(params, _threads(ctx))
    write_edge_list(edges, out)
    _emit({"out": out, **edges.to_dict()})


@cli.command(name="diameter")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["exact", "sampled"]), default="exact", show_default=True)
@click.option("--samples", type=click.IntRange(min=1), default=32, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0)
@click.option("--histogram", type=click.Path(dir_okay=False), help="Also write a distance,count CSV")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the result as JSON")
@click.pass_context
@handle_errors
def diameter_cmd(ctx: click.Context, graph: str, mode: str, samples: int, seed: int,
                 histogram: Optional[str], out: Optional[str]) -> None:
    """Print the diameter (exact) or a certified lower bound (sampled)"""
    g = _load_graph(graph)
    result = measure_diameter(g, mode=mode, samples=samples, seed=seed, threads=_threads(ctx))
    if histogram:
        write_distance_histogram(distance_histogram(g, threads=_threads(ctx)), histogram)
    if out:
        Path(out).write_text(json.dumps(result.to_dict(), indent=2) + "\n")
    click.echo(str(result.value))


@cli.command(name="mix")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--starts", type=click.Choice(["all", "sample"]), default="all", show_default=True)
@click.option("--samples", type=click.IntRange(min=1), default=None, help="Random starts (default MNW_SAMPLED_STARTS)")
@click.option("--seed", type=click.IntRange(min=0), default=0)
@click.option("--search", type=click.Choice(["bisect", "linear"]), default="bisect", show_default=True)
@click.option("--tv-curve", "curve_start", type=int, default=None, help="Also write the TV curve from this start")
@click.option("--t-max", type=click.IntRange(min=0), default=100, show_default=True)
@click.option("--curve-out", type=click.Path(dir_okay=False), default="tv_curve.csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
@click.pass_context
@handle_errors
def mix_cmd(ctx: click.Context, graph: str, starts: str, samples: Optional[int], seed: int, search: str,
            curve_start: Optional[int], t_max: int, curve_out: str, out: Optional[str]) -> None:
    """Measure the lazy walk mixing time"""
    g = _load_graph(graph)
    result = mixing_time(g, starts=starts, samples=samples, seed=seed, search=search, threads=_threads(ctx))
    if curve_start is not None:
        write_tv_curve(tv_curve(g, curve_start, t_max), curve_out)
    _emit(result.to_dict(), out)


@cli.command(name="spectral")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.option("--method", type=click.Choice(["power", "lanczos", "dense"]), default="power", show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0)
@click.option("--out", type=click.Path(dir_okay=False))
@handle_errors
def spectral_cmd(graph: str, tol: float, method: str, seed: int, out: Optional[str]) -> None:
    """Spectral gap and the relaxation-time bound on T_mix"""
    g = _load_graph(graph)
    gap = spectral_gap(g, tol=tol, seed=seed, method=method)
    bound, pi_min = upper_bound_tmix(g, gap)
    _emit({"spectral_gap": gap, "lambda_1": 1.0 - gap, "tmix_upper_bound": bound, "pi_min": pi_min,
           "method": method}, out)


BOUND_CHECKS = ("conductance", "isoperimetric", "sweep", "diameter", "cheeger", "mixing")


@cli.command(name="bounds")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--check", "checks", type=click.Choice(BOUND_CHECKS), multiple=True,
              help="Checks to run (repeatable; default all)")
@click.option("--out", type=click.Path(dir_okay=False))
@click.pass_context
@handle_errors
def bounds_cmd(ctx: click.Context, graph: str, checks: List[str], out: Optional[str]) -> None:
    """Conductance, isoperimetric constant and the inequalities built on them"""
    g = _load_graph(graph)
    threads = _threads(ctx)
    report: Dict[str, Any] = {}
    cache: Dict[str, float] = {}

    def gap() -> float:
        if "gap" not in cache:
            cache["gap"] = 1.0 - second_eigenpair(g)[0]
        return cache["gap"]

    runners = {
        "conductance": lambda: isoperimetry.conductance_exact(g, threads).to_dict(),
        "isoperimetric": lambda: isoperimetry.isoperimetric_exact(g, threads).to_dict(),
        "sweep": lambda: isoperimetry.conductance_sweep(g).to_dict(),
        "diameter": lambda: isoperimetry.diameter_bound_check(g).to_dict(),
        "cheeger": lambda: [r.to_dict() for r in isoperimetry.cheeger_check(g, gap=gap())],
        "mixing": lambda: isoperimetry.mixing_bound_check(g, gap=gap()).to_dict(),
    }
    for name in checks or BOUND_CHECKS:
        try:
            report[name] = runners[name]()
        except (ResourceCapError, ConvergenceError) as e:
            if _strict(ctx):
                raise
            logger.warning(f"Skipping {name}: {e}")
            report[name] = {"skipped": str(e)}
    _emit(report, out)


@cli.command(name="boxes")
@click.argument("graph", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--r", "r", type=float, default=0.5, show_default=True, help="Box side ceil(2 ln^r n)")
@click.option("--params", "params_file", type=click.Path(exists=True, dir_okay=False),
              help="Model parameters for the frequency study (instead of GRAPH)")
@click.option("--trials", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
@click.pass_context
@handle_errors
def boxes_cmd(ctx: click.Context, graph: Optional[str], r: float, params_file: Optional[str],
              trials: int, out: Optional[str]) -> None:
    """Empty boxes of one graph, or their frequency over seeds with --params"""
    if graph:
        edges = read_edge_list(graph)
        origins = box_scan.empty_box_scan(edges, r)
        _emit({"r": r, "side": box_scan.box_side(edges.n, r), "count": len(origins), "origins": origins}, out)
        return
    if not params_file:
        raise ParameterError("boxes needs a GRAPH file or --params")
    raw = read_config_file(params_file)
    params = ModelParams.create(**{k: v for k, v in raw.get("model", raw).items() if k in MODEL_KEYS})
    result = empty_box_frequency(params, r, trials, _threads(ctx))
    _emit({"r": r, **result.to_dict()}, out)


@cli.command(name="scan")
@click.option("--params", "params_file", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Experiment config (TOML/JSON/YAML)")
@click.option("--out", type=click.Path(dir_okay=False), help="Records CSV (default from the config)")
@click.option("--progress", is_flag=True, help="Show a progress bar")
@click.pass_context
@handle_errors
def scan_cmd(ctx: click.Context, params_file: str, out: Optional[str], progress: bool) -> None:
    """Run a resumable scaling scan"""
    config = load_config(params_file)
    if _strict(ctx):
        config = config.model_copy(update={"strict": True})
    records = run_scan(config, out=out, threads=_threads(ctx), progress=progress)
    skipped = sum(1 for record in records if record.skipped)
    click.echo(json.dumps({"records": len(records), "with_skips": skipped, "out": out or config.output.records}))


@cli.command(name="ldcheck")
@click.option("--params", "params_file", type=click.Path(exists=True, dir_okay=False),
              help="Grid file with n, p and z lists")
@click.option("--n", "n_values", type=int, multiple=True)
@click.option("--p", "p_values", type=float, multiple=True)
@click.option("--z", "z_values", type=float, multiple=True)
@click.option("--out", type=click.Path(dir_okay=False))
@handle_errors
def ldcheck_cmd(params_file: Optional[str], n_values: List[int], p_values: List[float],
                z_values: List[float], out: Optional[str]) -> None:
    """Exact binomial tails against the large-deviation bounds"""
    grid: Dict[str, Any] = {}
    if params_file:
        raw = read_config_file(params_file)
        grid.update(raw.get("grid", raw))
    for key, values in (("n", n_values), ("p", p_values), ("z", z_values)):
        if values:
            grid[key] = list(values)
    report = check_ld_bounds(grid)
    _emit(report.to_dict(), out)


@cli.command(name="fit")
@click.argument("records", type=click.Path(exists=True, dir_okay=False))
@click.option("--response", type=click.Choice(["diameter", "tmix"]), default="diameter", show_default=True)
@click.option("--resamples", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0)
@click.option("--out", type=click.Path(dir_okay=False))
@handle_errors
def fit_cmd(records: str, response: str, resamples: int, seed: int, out: Optional[str]) -> None:
    """Fit the polylog exponent of a scan's records"""
    fit = fit_polylog_exponent(read_records(records), response=response, resamples=resamples, seed=seed)
    _emit(fit.to_dict(), out)


def main(argv: Optional[List[str]] = None) -> int:
    """Console entry point; returns the exit code"""
    try:
        cli.main(args=argv, prog_name="mnw")
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else (0 if e.code is None else 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
