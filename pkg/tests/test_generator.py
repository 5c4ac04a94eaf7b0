"""
Tests for the long-edge samplers and the counter-based random streams
"""

import math

import numpy as np
import pytest

from backend.src.generation import rng
from backend.src.generation.edge_list import EdgeList, ModelKind
from backend.src.generation.generator import (
    eligible_pair_count,
    generate,
    generate_original_nw,
    generate_reference,
)
from backend.src.model.params import ModelParams
from backend.src.model.torus import annulus_size, torus_distances
from backend.src.utils.exceptions import GraphFormatError, ParameterError, ResourceCapError


def params(**overrides):
    values = {"d": 1, "n": 100, "alpha": 0.1, "beta": 0.4, "sigma": 1.0, "zeta": 0.0, "seed": 7}
    values.update(overrides)
    return ModelParams(**values)


def test_sigma_zero_gives_pure_torus():
    edges = generate(params(sigma=0.0))
    assert edges.long_edge_count == 0
    assert edges.torus_edge_count == 100


def test_same_seed_same_edges():
    first = generate(params(seed=11))
    second = generate(params(seed=11))
    np.testing.assert_array_equal(first.long_edges, second.long_edges)


def test_different_seeds_differ():
    first = generate(params(seed=1, sigma=5.0))
    second = generate(params(seed=2, sigma=5.0))
    assert not np.array_equal(first.long_edges, second.long_edges)


def test_thread_count_invariant():
    p = params(d=2, n=40, sigma=20.0, seed=5)
    np.testing.assert_array_equal(generate(p, threads=1).long_edges, generate(p, threads=4).long_edges)


@pytest.mark.parametrize("p", [
    params(sigma=3.0),
    params(d=2, n=16, alpha=0.15, beta=0.45, sigma=8.0),
    params(n=20, alpha=0.2, beta=0.4, sigma=20.0),
])
def test_edges_are_simple_and_in_window(p):
    edges = generate(p)
    edges.validate()
    u, v = edges.long_edges[:, 0], edges.long_edges[:, 1]
    assert (u < v).all()
    lo, hi = p.window
    distances = torus_distances(u, v, p.d, p.n)
    assert ((distances >= lo) & (distances <= hi)).all()
    assert len(np.unique(u * p.vertex_count + v)) == len(u)


def test_p_equal_one_takes_every_pair():
    p = params(n=20, alpha=0.2, beta=0.4, sigma=20.0)
    assert p.p_n == pytest.approx(1.0)
    assert generate(p).long_edge_count == eligible_pair_count(p)


@pytest.mark.slow
def test_mean_edge_count():
    p = params()
    counts = np.array([generate(p.with_seed(seed)).long_edge_count for seed in range(10**4)])
    expected = eligible_pair_count(p) * p.p_n
    assert expected == pytest.approx(31.0)
    standard_error = math.sqrt(expected * (1 - p.p_n) / len(counts))
    assert abs(counts.mean() - expected) <= 3 * standard_error


def test_reference_sampler_matches_fast_sampler_mean():
    p = params(n=16, alpha=0.1, beta=0.4, sigma=2.0)
    N = eligible_pair_count(p)
    fast = np.array([generate(p.with_seed(s)).long_edge_count for s in range(1500)])
    slow = np.array([generate_reference(p.with_seed(s)).long_edge_count for s in range(1500)])
    se = math.sqrt(2 * N * p.p_n * (1 - p.p_n) / 1500)
    assert abs(fast.mean() - slow.mean()) <= 5 * se


def test_reference_sampler_cap():
    with pytest.raises(ResourceCapError) as info:
        generate_reference(params(n=33))
    assert info.value.cap_name == "reference_sampler_max_n"


class TestOriginalNW:
    def test_zero_mean_is_a_ring(self):
        edges = generate_original_nw(50, 0.0, seed=1)
        assert edges.long_edge_count == 0
        assert edges.raw_stub_count == 0
        assert edges.kind is ModelKind.ORIGINAL

    def test_stub_total(self):
        edges = generate_original_nw(1000, 0.5, seed=3)
        assert abs(edges.raw_stub_count - 500) <= 5 * math.sqrt(500)
        assert edges.long_edge_count <= edges.raw_stub_count

    def test_collapsed_to_simple_graph(self):
        edges = generate_original_nw(30, 3.0, seed=4)
        edges.validate()
        gap = np.abs(edges.long_edges[:, 0] - edges.long_edges[:, 1])
        assert not np.isin(gap, [0, 1, 29]).any()

    def test_deterministic(self):
        np.testing.assert_array_equal(
            generate_original_nw(200, 1.0, seed=9).long_edges,
            generate_original_nw(200, 1.0, seed=9).long_edges,
        )

    @pytest.mark.parametrize("n,p", [(2, 1.0), (10, -0.5), (10, math.inf)])
    def test_invalid(self, n, p):
        with pytest.raises(ParameterError):
            generate_original_nw(n, p)


class TestEdgeListValidation:
    def test_rejects_out_of_window(self):
        p = params(n=20)
        edges = EdgeList(ModelKind.MODIFIED, 1, 20, np.array([[0, 1]]), p)
        with pytest.raises(GraphFormatError):
            edges.validate()

    def test_rejects_duplicates_and_loops(self):
        p = params(n=20)
        with pytest.raises(GraphFormatError):
            EdgeList(ModelKind.MODIFIED, 1, 20, np.array([[0, 5], [0, 5]]), p).validate()
        with pytest.raises(GraphFormatError):
            EdgeList(ModelKind.MODIFIED, 1, 20, np.array([[5, 5]]), p).validate()


class TestStreams:
    def test_stream_is_reproducible(self):
        a = rng.stream(42, rng.STREAM_SOURCES).integers(0, 1 << 30, size=8)
        b = rng.stream(42, rng.STREAM_SOURCES).integers(0, 1 << 30, size=8)
        np.testing.assert_array_equal(a, b)

    def test_streams_are_distinct(self):
        a = rng.stream(42, rng.STREAM_SOURCES).random(8)
        b = rng.stream(42, rng.STREAM_SPECTRAL).random(8)
        assert not np.array_equal(a, b)

    def test_derive_seed(self):
        seed = rng.derive_seed(5, "cell", 0)
        assert seed == rng.derive_seed(5, "cell", 0)
        assert seed != rng.derive_seed(5, "cell", 1)
        assert 0 <= seed < 2**64


@pytest.mark.slow
def test_degree_law_chi_square():
    from scipy import stats

    p = params(n=1024, sigma=1.0, zeta=1.0)
    size = annulus_size(p)
    degrees = np.concatenate([
        np.bincount(generate(p.with_seed(seed)).long_edges.reshape(-1), minlength=p.vertex_count)
        for seed in range(10)
    ])
    assert len(degrees) >= 10**4

    tail_start = 10
    observed = np.append(np.bincount(np.minimum(degrees, tail_start), minlength=tail_start + 1)[:tail_start],
                         np.count_nonzero(degrees >= tail_start))
    probabilities = np.append(stats.binom.pmf(np.arange(tail_start), size, p.p_n),
                              stats.binom.sf(tail_start - 1, size, p.p_n))
    _, p_value = stats.chisquare(observed, probabilities * len(degrees))
    assert p_value > 0.001

    mean = size * p.p_n
    # each long edge adds to two degrees
    standard_error = math.sqrt(2 * size * p.p_n * (1 - p.p_n) / len(degrees))
    assert abs(degrees.mean() - mean) <= 3 * standard_error


@pytest.mark.slow
def test_fast_and_reference_samplers_agree():
    p = params(n=16, sigma=2.0)
    trials = 10**5
    fast_counts = np.zeros(trials)
    slow_counts = np.zeros(trials)
    fast_pair = slow_pair = 0
    watched = (0, 4)
    for seed in range(trials):
        fast = generate(p.with_seed(seed)).long_edges
        slow = generate_reference(p.with_seed(seed)).long_edges
        fast_counts[seed], slow_counts[seed] = len(fast), len(slow)
        fast_pair += bool(((fast[:, 0] == watched[0]) & (fast[:, 1] == watched[1])).any())
        slow_pair += bool(((slow[:, 0] == watched[0]) & (slow[:, 1] == watched[1])).any())
    N = eligible_pair_count(p)
    count_se = math.sqrt(2 * N * p.p_n * (1 - p.p_n) / trials)
    assert abs(fast_counts.mean() - slow_counts.mean()) <= 3 * count_se
    pair_se = math.sqrt(2 * p.p_n * (1 - p.p_n) / trials)
    assert abs(fast_pair - slow_pair) / trials <= 3 * pair_se
