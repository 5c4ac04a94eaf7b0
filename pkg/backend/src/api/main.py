"""
Module: main
Description: FastAPI service exposing model summaries, small-graph generation and
measurements with the same caps as the CLI
"""

import logging
from typing import Any, Dict, List

from dotenv import load_dotenv
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from ..generation.generator import eligible_pair_count, generate
from ..model.params import ModelParams
from ..model.torus import annulus_size
from ..pipeline.experiment_config import ExperimentConfig, Measurement
from ..pipeline.regimes import predicted_regime
from ..pipeline.runner import measure_params
from ..utils.exceptions import ConvergenceError, ParameterError, ResourceCapError
from ..utils.logging_config import configure_logging
from ..utils.settings import get_settings

load_dotenv()

logger = logging.getLogger(__name__)

API_VERSION = "0.3.0"

app = FastAPI(
    title="Modified Newman-Watts Small World API",
    description="Sample the modified Newman-Watts graph on the torus and measure diameter, mixing and spectral gap",
    version=API_VERSION,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:3000", "http://localhost:5173"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


class MeasureRequest(BaseModel):
    """Model parameters plus the measurements to run"""
    params: ModelParams
    measurements: List[Measurement] = Field(
        default_factory=lambda: [Measurement.DIAMETER, Measurement.MAX_DEGREE]
    )
    box_r: float = Field(0.5, gt=0.0)


def _check_size(params: ModelParams) -> None:
    cap = get_settings().max_exact_mixing_vertices
    if params.vertex_count > cap:
        raise ResourceCapError("max_exact_mixing_vertices", cap, params.vertex_count)


def _http_error(e: Exception, where: str) -> HTTPException:
    if isinstance(e, ParameterError):
        return HTTPException(status_code=422, detail=str(e))
    if isinstance(e, (ResourceCapError, ConvergenceError)):
        return HTTPException(status_code=413, detail=str(e))
    logger.error(f"Error in {where}: {e}")
    return HTTPException(status_code=500, detail=str(e))


@app.get("/")
async def root():
    """Root endpoint"""
    return {"message": "Modified Newman-Watts Small World API", "version": API_VERSION, "docs": "/docs"}


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {"status": "healthy"}


@app.post("/api/v1/model/summary")
async def model_summary(params: ModelParams) -> Dict[str, Any]:
    """
    Derived quantities of a parameter set

    Example body: {"d": 1, "n": 1024, "alpha": 0.1, "beta": 0.4, "sigma": 1, "zeta": 1}
    """
    try:
        pairs = eligible_pair_count(params)
        return {
            **params.to_dict(),
            "vertex_count": params.vertex_count,
            "window": list(params.window),
            "annulus_size": annulus_size(params),
            "eligible_pairs": pairs,
            "expected_long_edges": pairs * params.p_n,
            "prediction": predicted_regime(params).to_dict(),
        }
    except Exception as e:
        raise _http_error(e, "model_summary")


@app.post("/api/v1/generate")
def generate_graph(params: ModelParams) -> Dict[str, Any]:
    """Sample a small graph and return its long edges"""
    try:
        _check_size(params)
        edges = generate(params)
        return {**edges.to_dict(), "long_edges": edges.pairs()}
    except Exception as e:
        raise _http_error(e, "generate_graph")


@app.post("/api/v1/measure")
def measure(request: MeasureRequest) -> Dict[str, Any]:
    """Sample a small graph and run the requested measurements (strict caps)"""
    try:
        _check_size(request.params)
        config = ExperimentConfig.create(measurements=request.measurements, box_r=request.box_r, strict=True)
        record = measure_params(request.params, config)
        result = record.to_dict()
        result.pop("cell_id")
        result.pop("replicate")
        return result
    except Exception as e:
        raise _http_error(e, "measure")


def main() -> None:
    """Run the service with uvicorn (MNW_LOG_LEVEL / MNW_LOG_JSON apply)"""
    import uvicorn

    configure_logging()
    uvicorn.run(app, host="0.0.0.0", port=8000)


if __name__ == "__main__":
    main()
