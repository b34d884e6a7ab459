import json
import math

import numpy as np
import pytest

from gossipsim.core import Algorithm, ConfigError
from gossipsim.harness import (
    CSV_COLUMNS,
    ExperimentSpec,
    GridCell,
    TRAJECTORY_RECORD_MAX_N,
    convergence_sweep,
    run_experiment,
    verify_suite,
)
from gossipsim.theory import constant


def spec_dict(path, **overrides):
    base = {
        "grid": [{"algorithm": "naive", "N": 512, "p": 0.5}],
        "trials_per_cell": 6,
        "base_seed": 99,
        "record_trajectory": False,
        "epsilon": 0.1,
        "output_path": str(path),
        "format": "csv",
    }
    base.update(overrides)
    return base


class TestExperimentSpec:
    def test_round_trip(self, tmp_path):
        data = spec_dict(tmp_path / "out.csv")
        spec = ExperimentSpec.from_dict(data)
        assert spec.grid == (GridCell(Algorithm.NAIVE, 512, 0.5),)
        assert spec.trials_per_cell == 6
        assert spec.format == "csv"

    @pytest.mark.parametrize("mutate", [
        lambda d: d.update(extra_key=1),
        lambda d: d.pop("base_seed"),
        lambda d: d.update(grid=[]),
        lambda d: d.update(grid=[{"algorithm": "naive", "N": 4}]),
        lambda d: d.update(grid=[{"algorithm": "naive", "N": 4, "p": 0.5,
                                  "seed": 1}]),
        lambda d: d.update(grid=[{"algorithm": "bogus", "N": 4, "p": 0.5}]),
        lambda d: d.update(grid=[{"algorithm": "naive", "N": 0, "p": 0.5}]),
        lambda d: d.update(trials_per_cell=0),
        lambda d: d.update(format="parquet"),
        lambda d: d.update(epsilon=0.9),
    ])
    def test_invalid_specs_rejected(self, tmp_path, mutate):
        data = spec_dict(tmp_path / "out.csv")
        mutate(data)
        with pytest.raises(ConfigError):
            ExperimentSpec.from_dict(data)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentSpec.from_json_file(str(tmp_path / "nope.json"))

    def test_malformed_json_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            ExperimentSpec.from_json_file(str(path))

    def test_trajectory_forced_off_above_limit(self):
        big = GridCell(Algorithm.NAIVE, TRAJECTORY_RECORD_MAX_N * 2, 0.5)
        assert not big.config(0.1, True).record_trajectory
        small = GridCell(Algorithm.NAIVE, 1024, 0.5)
        assert small.config(0.1, True).record_trajectory


class TestRunExperiment:
    def test_reruns_byte_identical(self, tmp_path):
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_experiment(ExperimentSpec.from_dict(spec_dict(out_a)))
        run_experiment(ExperimentSpec.from_dict(spec_dict(out_b)))
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_parallel_matches_serial(self, tmp_path):
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        grid = [{"algorithm": "naive", "N": 512, "p": 0.5},
                {"algorithm": "oracle", "N": 512, "p": 0.5}]
        run_experiment(ExperimentSpec.from_dict(spec_dict(out_a, grid=grid)))
        run_experiment(ExperimentSpec.from_dict(spec_dict(out_b, grid=grid)),
                       workers=3)
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_csv_shape_and_typing(self, tmp_path):
        out = tmp_path / "rows.csv"
        run_experiment(ExperimentSpec.from_dict(spec_dict(out)))
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + 6
        first = lines[1].split(",")
        row = dict(zip(CSV_COLUMNS, first))
        assert row["trial_id"] == "0"
        assert row["algorithm"] == "naive"
        assert row["p"] == "0.5"  # full round-trip float
        assert row["phase1_end"] == ""  # naive records no phase boundary
        assert row["cap_hit"] == "false"
        assert int(row["T_n"]) > 0

    def test_stream_ids_partition_cells(self, tmp_path):
        out = tmp_path / "rows.csv"
        grid = [{"algorithm": "naive", "N": 256, "p": 0.5},
                {"algorithm": "cyclic", "N": 256, "p": 0.5}]
        run_experiment(ExperimentSpec.from_dict(
            spec_dict(out, grid=grid, trials_per_cell=4)))
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        stream_ids = [int(r[CSV_COLUMNS.index("stream_id")]) for r in rows]
        trial_ids = [int(r[CSV_COLUMNS.index("trial_id")]) for r in rows]
        assert stream_ids == list(range(8))
        assert trial_ids == [0, 1, 2, 3, 0, 1, 2, 3]

    def test_json_format_with_trajectory(self, tmp_path):
        out = tmp_path / "rows.json"
        data = spec_dict(out, format="json", record_trajectory=True,
                         trials_per_cell=3)
        summary = run_experiment(ExperimentSpec.from_dict(data))
        payload = json.loads(out.read_text())
        assert len(payload["rows"]) == 3
        row = payload["rows"][0]
        assert row["trajectory"][0] == 1
        assert row["trajectory"][-1] == row["n_active"]
        assert len(row["trajectory"]) == row["T_n"] + 1
        cell = payload["summary"]["cells"][0]
        assert cell["mean"] == pytest.approx(summary.cells[0].mean)

    def test_summary_statistics(self, tmp_path):
        out = tmp_path / "rows.csv"
        data = spec_dict(out, trials_per_cell=12,
                         grid=[{"algorithm": "cyclic", "N": 1024, "p": 0.5}])
        summary = run_experiment(ExperimentSpec.from_dict(data))
        cell = summary.cells[0]
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        T = np.array([int(r[CSV_COLUMNS.index("T_n")]) for r in rows], dtype=float)
        assert cell.trials == 12
        assert cell.mean == pytest.approx(T.mean())
        assert cell.stddev == pytest.approx(T.std(ddof=1))
        assert cell.min == T.min() and cell.max == T.max()
        assert cell.q50 == pytest.approx(np.quantile(T, 0.5))
        assert cell.mean_normalized == pytest.approx(T.mean() / math.log(1024))
        assert cell.ratio == pytest.approx(
            cell.mean_normalized / constant(Algorithm.CYCLIC, 0.5))
        assert cell.cap_hits == 0

    def test_stage_means_partition_total(self, tmp_path):
        out = tmp_path / "rows.csv"
        data = spec_dict(out, trials_per_cell=10,
                         grid=[{"algorithm": "naive", "N": 2048, "p": 0.5}])
        summary = run_experiment(ExperimentSpec.from_dict(data))
        cell = summary.cells[0]
        assert cell.stage_means is not None
        assert sum(cell.stage_means) == pytest.approx(cell.mean)
        assert all(s >= 0 for s in cell.stage_means)

    def test_degenerate_cell_all_zero(self, tmp_path):
        out = tmp_path / "rows.csv"
        data = spec_dict(out, trials_per_cell=10,
                         grid=[{"algorithm": "naive", "N": 1, "p": 0.5}])
        summary = run_experiment(ExperimentSpec.from_dict(data))
        cell = summary.cells[0]
        assert cell.mean == 0.0 and cell.max == 0
        assert cell.mean_normalized == 0.0
        rows = out.read_text().splitlines()[1:]
        assert all(r.split(",")[CSV_COLUMNS.index("T_n")] == "0" for r in rows)

    def test_unwritable_path_rejected(self, tmp_path):
        data = spec_dict(tmp_path / "no" / "such" / "dir" / "out.csv")
        with pytest.raises(ConfigError):
            run_experiment(ExperimentSpec.from_dict(data))


class TestConvergenceSweep:
    def test_ladder_validation(self):
        with pytest.raises(ConfigError):
            convergence_sweep(Algorithm.NAIVE, 0.5, [1024], trials=2)
        with pytest.raises(ConfigError):
            convergence_sweep(Algorithm.NAIVE, 0.5, [1024, 512], trials=2)
        with pytest.raises(ConfigError):
            convergence_sweep(Algorithm.NAIVE, 0.5, [512, 1024], trials=0)

    def test_oracle_full_activity_is_exact(self):
        rows = convergence_sweep(Algorithm.ORACLE, 1.0, [2 ** 10, 2 ** 12],
                                 trials=5)
        for row in rows:
            assert row.ratio == pytest.approx(1.0)
            assert row.ratio_se == pytest.approx(0.0)
            assert row.mean_normalized == pytest.approx(
                math.log2(row.N) / math.log(row.N))

    def test_naive_dominates_improved_per_rung(self):
        # same seed family per rung: coupled comparison across sweeps
        naive = convergence_sweep(Algorithm.NAIVE, 0.5, [2 ** 9, 2 ** 11],
                                  trials=20)
        improved = convergence_sweep(Algorithm.IMPROVED_CYCLIC, 0.5,
                                     [2 ** 9, 2 ** 11], trials=20)
        for slow, fast in zip(naive, improved):
            assert slow.mean_normalized > fast.mean_normalized


class TestVerifySuite:
    def test_quick_level_passes(self):
        report = verify_suite("quick")
        assert report.all_passed, report.render()
        assert all(c.elapsed >= 0 for c in report.checks)
        assert "PASS" in report.render()

    def test_unknown_level_rejected(self):
        with pytest.raises(ConfigError):
            verify_suite("exhaustive")
