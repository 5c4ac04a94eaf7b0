"""
Tests for the mnw command line
"""

import json
import logging

import pytest
from click.testing import CliRunner

from backend.src.api.cli import EXIT_CAPPED, EXIT_INVALID, cli, main
from backend.src.generation.generator import generate
from backend.src.generation.graph_io import write_edge_list
from backend.src.model.params import ModelParams
from backend.src.utils.settings import get_settings

MODEL_FLAGS = ["--d", "1", "--n", "100", "--alpha", "0.1", "--beta", "0.4", "--sigma", "1", "--seed", "7"]


@pytest.fixture(autouse=True)
def restore_root_logger():
    """The CLI reconfigures the root logger against the runner's streams"""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def ring_file(tmp_path):
    def make(n, sigma=0.0, name="ring.mnw"):
        params = ModelParams(d=1, n=n, alpha=0.1, beta=0.4, sigma=sigma)
        return str(write_edge_list(generate(params), tmp_path / name))

    return make


def invoke(runner, args):
    return runner.invoke(cli, ["--log-level", "WARNING", *args])


class TestGenerate:
    def test_writes_graph_file(self, runner, tmp_path):
        out = tmp_path / "g.mnw"
        result = invoke(runner, ["generate", *MODEL_FLAGS, "--out", str(out)])
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0] == "mnw v1 1 100 0.1 0.4 1.0 0.0 7"
        summary = json.loads(result.stdout)
        assert summary["long_edge_count"] == len(lines) - 1
        assert summary["params"]["seed"] == 7

    def test_thread_count_does_not_change_file(self, runner, tmp_path):
        paths = [tmp_path / "one.mnw", tmp_path / "four.mnw"]
        for threads, path in zip(("1", "4"), paths):
            result = invoke(runner, ["--threads", threads, "generate", *MODEL_FLAGS, "--out", str(path)])
            assert result.exit_code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_params_file_with_flag_override(self, runner, tmp_path):
        params = tmp_path / "model.toml"
        params.write_text("[model]\nd = 1\nn = 50\nalpha = 0.1\nbeta = 0.4\nsigma = 2.0\nseed = 1\n")
        out = tmp_path / "g.mnw"
        result = invoke(runner, ["generate", "--params", str(params), "--seed", "5", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert out.read_text().splitlines()[0] == "mnw v1 1 50 0.1 0.4 2.0 0.0 5"

    def test_reference_sampler(self, runner, tmp_path):
        out = tmp_path / "g.mnw"
        flags = ["--d", "1", "--n", "20", "--alpha", "0.1", "--beta", "0.4", "--sigma", "2"]
        result = invoke(runner, ["generate", *flags, "--reference", "--out", str(out)])
        assert result.exit_code == 0, result.output

    def test_original_model(self, runner, tmp_path):
        out = tmp_path / "g.nw"
        result = invoke(runner, ["generate", "--model", "nw", "--n", "40", "--p", "0.5", "--seed", "3",
                                 "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert out.read_text().startswith("nw v1 40 0.5 3")

    def test_original_model_needs_mean(self, runner, tmp_path):
        result = invoke(runner, ["generate", "--model", "nw", "--n", "40", "--out", str(tmp_path / "g.nw")])
        assert result.exit_code == EXIT_INVALID

    def test_invalid_parameters(self, runner, tmp_path):
        flags = ["--d", "1", "--n", "100", "--alpha", "0.45", "--beta", "0.4", "--sigma", "1"]
        result = invoke(runner, ["generate", *flags, "--out", str(tmp_path / "g.mnw")])
        assert result.exit_code == EXIT_INVALID
        assert "alpha" in result.output

    def test_unknown_flag(self, runner, tmp_path):
        result = invoke(runner, ["generate", "--gamma", "1", "--out", str(tmp_path / "g.mnw")])
        assert result.exit_code == 2


class TestMeasurements:
    def test_diameter(self, runner, ring_file, tmp_path):
        histogram = tmp_path / "hist.csv"
        result = invoke(runner, ["diameter", ring_file(10), "--histogram", str(histogram)])
        assert result.exit_code == 0, result.output
        assert result.stdout.strip() == "5"
        assert histogram.read_text().splitlines()[0] == "distance,count"

    def test_sampled_diameter(self, runner, ring_file, tmp_path):
        out = tmp_path / "diameter.json"
        result = invoke(runner, ["diameter", ring_file(40, sigma=2.0), "--mode", "sampled", "--samples", "4",
                                 "--out", str(out)])
        assert result.exit_code == 0
        assert json.loads(out.read_text())["exact"] is False

    def test_malformed_graph_file(self, runner, tmp_path):
        path = tmp_path / "bad.mnw"
        path.write_text("mnw v9 1 10\n")
        assert invoke(runner, ["diameter", str(path)]).exit_code == EXIT_INVALID

    def test_mix(self, runner, ring_file, tmp_path):
        curve = tmp_path / "tv.csv"
        result = invoke(runner, ["mix", ring_file(4, name="c4.mnw"), "--tv-curve", "0", "--t-max", "3",
                                 "--curve-out", str(curve)])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["t_mix"] == 1 and payload["exact"]
        assert len(curve.read_text().splitlines()) == 5

    def test_mix_cap_is_skipped_when_lenient(self, runner, ring_file, monkeypatch):
        path = ring_file(10)
        monkeypatch.setenv("MNW_MAX_EXACT_MIXING_VERTICES", "4")
        get_settings.cache_clear()
        result = invoke(runner, ["--lenient", "mix", path])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["cap"] == "max_exact_mixing_vertices"

    def test_mix_cap_fails_when_strict(self, runner, ring_file, monkeypatch):
        path = ring_file(10)
        monkeypatch.setenv("MNW_MAX_EXACT_MIXING_VERTICES", "4")
        get_settings.cache_clear()
        assert invoke(runner, ["--strict", "mix", path]).exit_code == EXIT_CAPPED

    def test_strict_from_environment(self, runner, ring_file, monkeypatch):
        path = ring_file(30)
        monkeypatch.setenv("MNW_STRICT", "true")
        get_settings.cache_clear()
        assert invoke(runner, ["bounds", path, "--check", "conductance"]).exit_code == EXIT_CAPPED

    def test_spectral(self, runner, ring_file):
        result = invoke(runner, ["spectral", ring_file(16), "--method", "dense"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["spectral_gap"] == pytest.approx(0.5 * (1 - 0.9238795325112867), rel=1e-9)
        assert payload["tmix_upper_bound"] > 0


class TestBounds:
    def test_all_checks(self, runner, ring_file):
        result = invoke(runner, ["bounds", ring_file(4, name="c4.mnw")])
        assert result.exit_code == 0, result.output
        report = json.loads(result.stdout)
        assert set(report) == {"conductance", "isoperimetric", "sweep", "diameter", "cheeger", "mixing"}
        assert report["conductance"]["value"] == pytest.approx(0.25)
        assert all(r["holds"] for r in report["cheeger"])

    def test_strict_cap_exits_3(self, runner, ring_file):
        result = invoke(runner, ["--strict", "bounds", ring_file(30), "--check", "conductance"])
        assert result.exit_code == EXIT_CAPPED

    def test_lenient_cap_is_recorded(self, runner, ring_file):
        result = invoke(runner, ["--lenient", "bounds", ring_file(30), "--check", "conductance",
                                 "--check", "sweep"])
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert "skipped" in report["conductance"]
        assert report["sweep"]["bound"] == "upper"


class TestBoxes:
    def test_graph_scan(self, runner, ring_file):
        result = invoke(runner, ["boxes", ring_file(64), "--r", "0.5"])
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert (payload["side"], payload["count"]) == (5, 64)

    def test_frequency_study(self, runner, tmp_path):
        params = tmp_path / "model.json"
        params.write_text(json.dumps({"d": 1, "n": 64, "alpha": 0.15, "beta": 0.45, "sigma": 1.0}))
        result = invoke(runner, ["boxes", "--params", str(params), "--trials", "20"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["trials"] == 20 and 0.0 <= payload["frequency"] <= 1.0

    def test_needs_input(self, runner):
        assert invoke(runner, ["boxes"]).exit_code == EXIT_INVALID


class TestLdcheck:
    def test_flags(self, runner):
        result = invoke(runner, ["ldcheck", "--n", "100", "--p", "0.5", "--z", "0.7"])
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert payload["summary"]["cramer"] == {"evaluated": 1, "asserted": 1, "violations": 0, "reported": 0}
        assert payload["violations"] == []

    def test_grid_file(self, runner, tmp_path):
        grid = tmp_path / "grid.yaml"
        grid.write_text("grid:\n  n: [10, 100]\n  p: [0.001, 0.3]\n  z: [0.5, 2.0, 8.0]\n")
        out = tmp_path / "ld.json"
        result = invoke(runner, ["ldcheck", "--params", str(grid), "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert json.loads(out.read_text())["violations"] == []

    def test_missing_axis(self, runner):
        assert invoke(runner, ["ldcheck", "--n", "100"]).exit_code == EXIT_INVALID


class TestScanAndFit:
    def test_end_to_end(self, runner, tmp_path):
        config = tmp_path / "scan.toml"
        config.write_text(
            "replicates = 5\nmeasurements = [\"diameter\"]\n\n"
            "[grid]\nn = [8, 16, 32, 64]\nalpha = [0.1]\nbeta = [0.4]\nsigma = [0.0]\n"
        )
        records = tmp_path / "records.csv"
        result = invoke(runner, ["scan", "--params", str(config), "--out", str(records)])
        assert result.exit_code == 0, result.output
        assert json.loads(result.stdout)["records"] == 20

        fit_out = tmp_path / "fit.json"
        result = invoke(runner, ["fit", str(records), "--resamples", "50", "--out", str(fit_out)])
        assert result.exit_code == 0, result.output
        fit = json.loads(fit_out.read_text())
        assert fit["n_values"] == [8, 16, 32, 64]
        assert fit["medians"] == [4.0, 8.0, 16.0, 32.0]
        assert fit["replicates"] == [5, 5, 5, 5]

    def test_fit_needs_enough_data(self, runner, tmp_path):
        config = tmp_path / "scan.json"
        config.write_text(json.dumps({"grid": {"n": [8, 16], "alpha": [0.1], "beta": [0.4], "sigma": [0.0]}}))
        records = tmp_path / "records.csv"
        assert invoke(runner, ["scan", "--params", str(config), "--out", str(records)]).exit_code == 0
        assert invoke(runner, ["fit", str(records)]).exit_code == EXIT_INVALID


def test_main_returns_exit_code(tmp_path):
    assert main(["--help"]) == 0
    assert main(["diameter", str(tmp_path / "missing.mnw")]) == 2
