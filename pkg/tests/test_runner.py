"""
Tests for experiment configs and the resumable scaling scan
"""

import json

import pytest
import yaml

from backend.src.pipeline.experiment_config import ExperimentConfig, Measurement, load_config, read_config_file
from backend.src.pipeline.runner import RECORDS_HEADER, read_records, records_frame, run_scan
from backend.src.utils.exceptions import ParameterError, ResourceCapError

GRID = {"d": [1], "n": [8, 9], "alpha": [0.1], "beta": [0.4], "sigma": [0.0]}

CONFIG_TOML = """
replicates = 2
seed = 11
measurements = ["diameter", "max_degree"]

[grid]
d = [1]
n = [8, 9]
alpha = [0.1]
beta = [0.4]
sigma = [0.0]
"""


def scan_config(**overrides):
    values = {"grid": GRID, "replicates": 2, "seed": 11}
    values.update(overrides)
    return ExperimentConfig.create(**values)


def without_timing(records):
    return [{k: v for k, v in r.to_dict().items() if k != "wall_clock_s"} for r in records]


class TestExperimentConfig:
    def test_cells_in_grid_order(self):
        config = scan_config(grid={**GRID, "sigma": [0.0, 0.5]})
        cells = config.cells()
        assert [(c.params.n, c.params.sigma) for c in cells] == [(8, 0.0), (8, 0.5), (9, 0.0), (9, 0.5)]
        assert cells[0].cell_id == "d=1_n=8_alpha=0.1_beta=0.4_sigma=0.0_zeta=0.0"

    def test_replicate_seeds(self):
        config = scan_config()
        cell_id = config.cells()[0].cell_id
        assert config.replicate_seed(cell_id, 0) == scan_config().replicate_seed(cell_id, 0)
        assert config.replicate_seed(cell_id, 0) != config.replicate_seed(cell_id, 1)
        assert config.replicate_seed(cell_id, 0) != config.replicate_seed(config.cells()[1].cell_id, 0)
        assert config.replicate_seed(cell_id, 0) != scan_config(seed=12).replicate_seed(cell_id, 0)

    def test_defaults(self):
        config = scan_config()
        assert config.measurements == [Measurement.DIAMETER, Measurement.MAX_DEGREE]
        assert not config.strict
        assert config.caps.exact_mixing_max_vertices == 4096

    @pytest.mark.parametrize(
        "values",
        [
            {"grid": {**GRID, "alpha": [0.45]}},
            {"grid": {**GRID, "sigma": [1000.0]}},
            {"grid": GRID, "replicates": 0},
            {"grid": GRID, "measurements": ["volume"]},
            {"grid": GRID, "unknown": 1},
        ],
    )
    def test_invalid(self, values):
        with pytest.raises(ParameterError):
            ExperimentConfig.create(**values)

    def test_formats_agree(self, tmp_path):
        toml_path = tmp_path / "scan.toml"
        toml_path.write_text(CONFIG_TOML)
        payload = read_config_file(toml_path)
        json_path = tmp_path / "scan.json"
        json_path.write_text(json.dumps(payload))
        yaml_path = tmp_path / "scan.yaml"
        yaml_path.write_text(yaml.safe_dump(payload))

        configs = [load_config(p) for p in (toml_path, json_path, yaml_path)]
        assert configs[0] == configs[1] == configs[2]
        assert configs[0].replicates == 2 and configs[0].seed == 11
        assert len(configs[0].cells()) == 2

    def test_unknown_extension(self, tmp_path):
        path = tmp_path / "scan.ini"
        path.write_text("[grid]\n")
        with pytest.raises(ParameterError):
            read_config_file(path)

    def test_unparsable_file(self, tmp_path):
        path = tmp_path / "scan.json"
        path.write_text("{not json")
        with pytest.raises(ParameterError):
            read_config_file(path)


class TestRunScan:
    def test_pure_torus_records(self):
        records = run_scan(scan_config())
        assert [(r.n, r.replicate) for r in records] == [(8, 0), (8, 1), (9, 0), (9, 1)]
        for record in records:
            assert record.diameter == record.n // 2
            assert record.diameter_exact
            assert record.max_degree == 2
            assert record.long_edges == 0
            assert record.skipped is None

    def test_thread_count_does_not_change_records(self):
        config = scan_config(grid={**GRID, "sigma": [2.0]}, measurements=["diameter", "mixing", "gap"])
        assert without_timing(run_scan(config, threads=1)) == without_timing(run_scan(config, threads=3))

    def test_writes_versioned_csv(self, tmp_path):
        out = tmp_path / "nested" / "records.csv"
        records = run_scan(scan_config(), out=out)
        lines = out.read_text().splitlines()
        assert lines[0] == RECORDS_HEADER
        assert lines[1].startswith("cell_id,replicate,seed,d,n")
        assert len(lines) == 2 + len(records)
        assert without_timing(read_records(out)) == without_timing(records)

    def test_output_path_from_config(self, tmp_path):
        out = tmp_path / "from_config.csv"
        run_scan(scan_config(output={"records": str(out)}))
        assert len(read_records(out)) == 4

    def test_resume_skips_finished_replicates(self, tmp_path):
        out = tmp_path / "records.csv"
        first = run_scan(scan_config(replicates=1), out=out)
        assert len(first) == 2
        resumed = run_scan(scan_config(replicates=2), out=out)
        assert [(r.n, r.replicate) for r in resumed] == [(8, 0), (8, 1), (9, 0), (9, 1)]
        stored = read_records(out)
        assert len(stored) == 4
        assert without_timing(stored[:2]) == without_timing(first)
        assert len(run_scan(scan_config(replicates=2), out=out)) == 4
        assert len(read_records(out)) == 4

    def test_resume_after_interrupted_write(self, tmp_path):
        out = tmp_path / "records.csv"
        run_scan(scan_config(replicates=2), out=out)
        text = out.read_text()
        last_row = text.rstrip("\n").rfind("\n") + 1
        out.write_text(text[:last_row + 20])

        stored = read_records(out)
        assert [(r.n, r.replicate) for r in stored] == [(8, 0), (8, 1), (9, 0)]

        resumed = run_scan(scan_config(replicates=2), out=out)
        assert [(r.n, r.replicate) for r in resumed] == [(8, 0), (8, 1), (9, 0), (9, 1)]
        assert without_timing(read_records(out)) == without_timing(resumed)
        assert out.read_text().endswith("\n")

    def test_resume_after_cut_header(self, tmp_path):
        out = tmp_path / "records.csv"
        out.write_text(RECORDS_HEADER + "\ncell_id,repl")
        records = run_scan(scan_config(replicates=1), out=out)
        assert len(records) == 2
        assert len(read_records(out)) == 2

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ParameterError):
            read_records(path)

    def test_lenient_scan_records_skip(self):
        config = scan_config(
            grid={**GRID, "n": [16]}, replicates=1, measurements=["diameter", "mixing"],
            caps={"exact_mixing_max_vertices": 4, "sampled_mixing_max_vertices": 8},
        )
        (record,) = run_scan(config)
        assert record.diameter == 8
        assert record.t_mix is None
        assert "mixing" in record.skipped

    def test_strict_scan_raises(self, tmp_path):
        config = scan_config(
            grid={**GRID, "n": [16]}, replicates=1, measurements=["mixing"], strict=True,
            caps={"exact_mixing_max_vertices": 4, "sampled_mixing_max_vertices": 8},
        )
        with pytest.raises(ResourceCapError):
            run_scan(config, out=tmp_path / "records.csv")

    def test_sampled_modes_are_flagged(self):
        config = scan_config(
            grid={**GRID, "n": [32], "sigma": [2.0]}, replicates=1, measurements=["diameter", "mixing"],
            caps={"exact_diameter_max_vertices": 4, "diameter_samples": 4,
                  "exact_mixing_max_vertices": 4, "mixing_starts": 4},
        )
        (record,) = run_scan(config)
        assert record.diameter_method == "sampled"
        assert record.diameter_exact is False
        assert record.t_mix_exact is False
        assert record.t_mix >= 1

    def test_gap_and_boxes(self):
        config = scan_config(grid={**GRID, "n": [16]}, replicates=1, measurements=["gap", "boxes"])
        (record,) = run_scan(config)
        assert record.gap_method == "power"
        assert record.spectral_gap == pytest.approx(0.5 * (1 - 0.9238795325112867), rel=1e-4)
        assert record.box_side == 4
        assert record.empty_boxes == 16

    def test_box_side_too_large_is_skipped(self):
        config = scan_config(replicates=1, measurements=["boxes"], box_r=3.0)
        records = run_scan(config)
        assert all(r.box_side is None and "boxes" in r.skipped for r in records)

    def test_records_frame_columns(self):
        frame = records_frame(run_scan(scan_config(replicates=1)))
        assert list(frame.columns[:5]) == ["cell_id", "replicate", "seed", "d", "n"]
        assert len(frame) == 2
