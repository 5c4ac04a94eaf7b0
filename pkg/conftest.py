# conftest.py
import numpy as np
import pytest
from dotenv import load_dotenv

from backend.src.analysis.graph import Graph, build
from backend.src.generation.generator import generate
from backend.src.model.params import ModelParams
from backend.src.utils.settings import get_settings

# Load environment variables from .env file
load_dotenv()


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Settings are cached per process; tests that set MNW_* vars get a clean copy"""
    for name in ("MNW_THREADS", "MNW_STRICT", "MNW_MAX_EXACT_MIXING_VERTICES",
                 "MNW_MAX_BRUTE_FORCE_VERTICES", "MNW_MAX_MIXING_STEPS"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def torus_params():
    """Factory for pure-torus parameters (sigma = 0)"""

    def make(d: int = 1, n: int = 8, alpha: float = 0.1, beta: float = 0.4) -> ModelParams:
        return ModelParams(d=d, n=n, alpha=alpha, beta=beta, sigma=0.0)

    return make


@pytest.fixture
def torus_graph(torus_params):
    """Factory for pure-torus graphs"""

    def make(d: int = 1, n: int = 8) -> Graph:
        return build(generate(torus_params(d, n)))

    return make


@pytest.fixture
def cycle4(torus_graph) -> Graph:
    """The 4-cycle, i.e. the d=1, n=4 pure torus"""
    return torus_graph(1, 4)


@pytest.fixture
def two_vertex_graph() -> Graph:
    """A single edge between vertices 0 and 1"""
    return Graph(
        d=1,
        n=2,
        indptr=np.array([0, 1, 2], dtype=np.int64),
        indices=np.array([1, 0], dtype=np.int64),
        is_long=np.zeros(2, dtype=bool),
        degrees=np.array([1, 1], dtype=np.int64),
    )


@pytest.fixture
def small_corpus():
    """Sampled graphs with at most 16 vertices: pure rings and modified NW samples"""
    graphs = []
    for n in (5, 8, 12, 16):
        graphs.append(build(generate(ModelParams(d=1, n=n, alpha=0.1, beta=0.4, sigma=0.0))))
    for seed in range(6):
        for n in (8, 12, 16):
            params = ModelParams(d=1, n=n, alpha=0.2, beta=0.45, sigma=3.0, seed=seed)
            graphs.append(build(generate(params)))
    return graphs
