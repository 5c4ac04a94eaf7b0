"""
Tests for the lazy random walk: kernel, TV distance, mixing time and spectral gap
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from backend.src.analysis import walk
from backend.src.analysis.graph import build
from backend.src.analysis.walk import (
    MIXING_THRESHOLD,
    dense_kernel,
    kernel_step,
    mixing_time,
    second_eigenpair,
    spectral_gap,
    stationary_distribution,
    tv_curve,
    tv_distance,
    upper_bound_tmix,
    write_tv_curve,
)
from backend.src.generation.generator import generate
from backend.src.model.params import ModelParams
from backend.src.utils.exceptions import ConvergenceError, ParameterError, ResourceCapError


def dense_tmix(g):
    """Mixing time from exact dense matrix powers"""
    P = dense_kernel(g)
    pi = stationary_distribution(g).pi
    Pt = np.eye(g.vertex_count)
    t = 0
    while 0.5 * np.abs(Pt - pi[None, :]).sum(axis=1).max() >= MIXING_THRESHOLD:
        Pt = Pt @ P
        t += 1
    return t


def sample_graph(n=16, sigma=3.0, seed=0, d=1):
    return build(generate(ModelParams(d=d, n=n, alpha=0.2, beta=0.45, sigma=sigma, seed=seed)))


class TestKernel:
    def test_two_vertex_step(self, two_vertex_graph):
        np.testing.assert_allclose(kernel_step(two_vertex_graph, [1.0, 0.0]), [0.5, 0.5])

    def test_cycle_step(self, cycle4):
        np.testing.assert_allclose(kernel_step(cycle4, [1.0, 0.0, 0.0, 0.0]), [0.5, 0.25, 0.0, 0.25])

    def test_stationary_is_fixed(self):
        g = sample_graph(n=40, sigma=4.0, seed=3)
        pi = stationary_distribution(g).pi
        assert np.abs(kernel_step(g, pi) - pi).sum() <= 1e-10
        assert pi.sum() == pytest.approx(1.0, abs=1e-12)

    def test_block_step_matches_columns(self):
        g = sample_graph(seed=1)
        block = np.eye(g.vertex_count)[:, :3]
        stepped = kernel_step(g, block)
        for j in range(3):
            np.testing.assert_allclose(stepped[:, j], kernel_step(g, block[:, j]))

    def test_dimension_mismatch(self, cycle4):
        with pytest.raises(ParameterError):
            kernel_step(cycle4, np.ones(5) / 5)

    def test_reversible_in_exact_arithmetic(self):
        g = sample_graph(n=16, seed=2)
        total = int(g.degrees.sum())
        for u in range(g.vertex_count):
            for v in g.neighbors(u):
                du, dv = int(g.degrees[u]), int(g.degrees[v])
                assert Fraction(du, total) * Fraction(1, 2 * du) == Fraction(dv, total) * Fraction(1, 2 * dv)

    def test_regular_pi_min(self, torus_graph):
        assert stationary_distribution(torus_graph(2, 5)).pi_min == pytest.approx(1 / 25)


class TestTV:
    def test_identical(self):
        mu = np.array([0.2, 0.3, 0.5])
        assert tv_distance(mu, mu) == 0.0

    def test_point_mass_vs_uniform(self):
        m = 7
        point = np.zeros(m)
        point[0] = 1.0
        assert tv_distance(point, np.full(m, 1 / m)) == pytest.approx(1 - 1 / m)

    def test_half_mass(self):
        assert tv_distance([0.5, 0.5, 0, 0], [0.25] * 4) == pytest.approx(0.5)

    def test_shape_mismatch(self):
        with pytest.raises(ParameterError):
            tv_distance([1.0], [0.5, 0.5])


class TestMixingTime:
    def test_two_vertex(self, two_vertex_graph):
        result = mixing_time(two_vertex_graph)
        assert result.t_mix == 1
        assert result.exact
        assert result.tv_at_t_mix == pytest.approx(0.0)

    def test_cycle_matches_dense(self, cycle4):
        result = mixing_time(cycle4)
        assert result.t_mix == dense_tmix(cycle4) == 1

    def test_threshold_contract(self):
        g = sample_graph(n=16, seed=4)
        result = mixing_time(g)
        assert result.tv_at_t_mix < MIXING_THRESHOLD <= result.tv_before
        curve = dict(tv_curve(g, result.worst_start, result.t_mix))
        assert curve[result.t_mix - 1] == pytest.approx(result.tv_before)

    @pytest.mark.parametrize("search", ["bisect", "linear"])
    def test_reported_tv_is_worst_over_all_blocks(self, monkeypatch, search):
        g = sample_graph(n=16, seed=4)
        monkeypatch.setattr(walk, "EVOLUTION_BLOCK_CELLS", 3 * g.vertex_count)
        result = mixing_time(g, search=search, threads=2)
        assert result.t_mix == dense_tmix(g)

        P = dense_kernel(g)
        pi = stationary_distribution(g).pi
        before = np.linalg.matrix_power(P, result.t_mix - 1)
        tv_before = 0.5 * np.abs(before - pi[None, :]).sum(axis=1)
        tv_at = 0.5 * np.abs(before @ P - pi[None, :]).sum(axis=1)
        assert result.tv_before == pytest.approx(tv_before.max())
        assert result.tv_at_t_mix == pytest.approx(tv_at.max())
        assert tv_before[result.worst_start] == pytest.approx(tv_before.max())

    def test_bisect_matches_linear_on_ring(self, torus_graph):
        g = torus_graph(1, 64)
        assert mixing_time(g, search="bisect").t_mix == mixing_time(g, search="linear").t_mix

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_dense_oracle(self, seed):
        g = sample_graph(n=8 + 4 * (seed % 3), seed=seed)
        assert mixing_time(g, threads=2).t_mix == dense_tmix(g)

    def test_worst_start_tv_non_increasing(self):
        g = sample_graph(n=24, seed=5)
        P = dense_kernel(g)
        pi = stationary_distribution(g).pi
        Pt = np.eye(g.vertex_count)
        previous = 1.0
        for _ in range(60):
            worst = 0.5 * np.abs(Pt - pi[None, :]).sum(axis=1).max()
            assert worst <= previous + 1e-12
            previous = worst
            Pt = Pt @ P

    def test_sampled_is_lower_bound(self):
        g = sample_graph(n=60, sigma=2.0, seed=6)
        exact = mixing_time(g)
        sampled = mixing_time(g, starts="sample", samples=4, seed=1)
        assert not sampled.exact
        assert isinstance(sampled.starts_evaluated, list)
        assert sampled.t_mix <= exact.t_mix

    def test_all_starts_cap(self, monkeypatch, torus_graph):
        monkeypatch.setenv("MNW_MAX_EXACT_MIXING_VERTICES", "8")
        with pytest.raises(ResourceCapError) as info:
            mixing_time(torus_graph(1, 9))
        assert info.value.cap_name == "max_exact_mixing_vertices"

    def test_step_cap(self, monkeypatch, torus_graph):
        monkeypatch.setenv("MNW_MAX_MIXING_STEPS", "2")
        with pytest.raises(ConvergenceError):
            mixing_time(torus_graph(1, 64))

    def test_tv_curve_csv(self, cycle4, tmp_path):
        path = write_tv_curve(tv_curve(cycle4, 0, 3), tmp_path / "tv.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "t,tv"
        assert len(lines) == 5


class TestSpectralGap:
    def test_two_vertex(self, two_vertex_graph):
        assert spectral_gap(two_vertex_graph) == pytest.approx(1.0)

    def test_cycle(self, cycle4):
        assert spectral_gap(cycle4) == pytest.approx(0.5, rel=1e-8)

    def test_ring_matches_dense(self, torus_graph):
        g = torus_graph(1, 16)
        expected = 0.5 * (1 - math.cos(2 * math.pi / 16))
        assert spectral_gap(g, tol=1e-10) == pytest.approx(expected, rel=1e-6)
        assert spectral_gap(g, method="dense") == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("seed", range(3))
    def test_methods_agree(self, seed):
        g = sample_graph(n=60, sigma=2.0, seed=seed)
        dense = spectral_gap(g, method="dense")
        assert spectral_gap(g, tol=1e-12, method="power") == pytest.approx(dense, rel=1e-4)
        assert spectral_gap(g, method="lanczos") == pytest.approx(dense, rel=1e-6)

    def test_eigenvector(self):
        g = sample_graph(n=20, seed=3)
        lam, vector = second_eigenpair(g)
        P = dense_kernel(g)
        np.testing.assert_allclose(P @ vector, lam * vector, atol=1e-10)

    def test_iteration_cap(self, torus_graph):
        with pytest.raises(ConvergenceError):
            spectral_gap(torus_graph(1, 64), max_iterations=3)

    def test_unknown_method(self, cycle4):
        with pytest.raises(ParameterError):
            spectral_gap(cycle4, method="qr")


class TestUpperBound:
    def test_two_vertex(self, two_vertex_graph):
        bound, pi_min = upper_bound_tmix(two_vertex_graph, gap=1.0)
        assert pi_min == pytest.approx(0.5)
        assert bound == pytest.approx(math.log(2 * math.e))
        assert bound >= mixing_time(two_vertex_graph).t_mix

    def test_cycle(self, cycle4):
        bound, pi_min = upper_bound_tmix(cycle4)
        assert pi_min == pytest.approx(0.25)
        assert bound == pytest.approx(math.log(4 * math.e) / 0.5, rel=1e-7)
        assert bound >= mixing_time(cycle4).t_mix
