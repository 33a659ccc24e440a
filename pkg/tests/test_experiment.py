import json
import math
import os

import numpy as np
import pytest

from pentapod.experiment import (CSV_HEADER, EXIT_CONVERGED, EXIT_ERROR,
                                 EXIT_NOT_CONVERGED, ExperimentConfig,
                                 ExperimentLogRow, main, make_goal_provider,
                                 read_csv, render_plot, run_experiment,
                                 write_csv)
from pentapod.plant import NoiseModel


def noise_free_config(**overrides):
    config = ExperimentConfig(noise=NoiseModel.noise_free(), **overrides)
    config.camera.pixel_noise_std = 0.0
    return config


class TestRunExperiment:
    def test_stationary_zero_noise_converges(self):
        result = run_experiment(noise_free_config())
        assert result.converged
        assert result.summary["final_cost_cm"] <= 12.0
        assert 13 <= result.summary["steps"] <= 16

    def test_floating_goal_converges(self):
        config = ExperimentConfig(
            scenario="floating",
            goal_path=[(0.0, 30.0, 0.0), (60.0, 45.0, 10.0), (200.0, 45.0, 10.0)],
            seed=1)
        result = run_experiment(config)
        assert result.converged

    def test_characterize_table(self):
        config = ExperimentConfig(scenario="characterize", characterize_samples=500,
                                  seed=2)
        result = run_experiment(config)
        table = result.summary["per_primitive"]
        assert sorted(table) == [0, 1, 2, 3, 4]
        for entry in table.values():
            assert entry["samples"] == 500
            margin = 3 * entry["stderr_cm"]
            assert abs(entry["mean_cm"] - entry["expected_mean_cm"]) < margin

    def test_unknown_scenario_rejected(self):
        with pytest.raises(ValueError):
            run_experiment(ExperimentConfig(scenario="teleport"))

    def test_reproducible_rows(self):
        config = ExperimentConfig(seed=5)
        a = run_experiment(config)
        b = run_experiment(config)
        assert a.rows == b.rows
        assert a.summary == b.summary

    def test_log_cost_consistent_with_pose_and_goal(self):
        result = run_experiment(ExperimentConfig(seed=3))
        for row in result.rows:
            recomputed = math.hypot(row.x - row.goal_x, row.y - row.goal_y)
            assert abs(row.cost - recomputed) < 1e-9

    def test_steps_strictly_increasing(self):
        result = run_experiment(ExperimentConfig(seed=4))
        steps = [r.step for r in result.rows]
        assert steps == sorted(set(steps))

    def test_summary_matches_recomputation_from_rows(self):
        result = run_experiment(ExperimentConfig(seed=6))
        assert result.summary["steps"] == len(result.rows)


class TestGoalProvider:
    def test_stationary_is_constant(self):
        provider = make_goal_provider(ExperimentConfig(goal_cm=(10.0, -5.0)))
        for t in (0.0, 3.7, 100.0):
            goal = provider(t)
            assert (goal.x_bar, goal.y_bar) == (10.0, -5.0)

    def test_piecewise_linear_interpolation(self):
        config = ExperimentConfig(scenario="floating",
                                  goal_path=[(0, 0, 0), (10, 20, 0)])
        provider = make_goal_provider(config)
        assert provider(5.0).x_bar == pytest.approx(10.0)
        assert provider(-1.0).x_bar == 0.0
        assert provider(99.0).x_bar == 20.0


class TestCsv:
    def test_empty_log_is_header_only(self, tmp_path):
        path = tmp_path / "log.csv"
        write_csv([], str(path))
        assert path.read_text() == CSV_HEADER + "\n"

    def test_three_rows_four_lines(self, tmp_path):
        rows = [ExperimentLogRow(i, i * 2.52, 0.0, 0.0, 0.0, 40.0, 0.0, 1, 40.0)
                for i in range(3)]
        path = tmp_path / "log.csv"
        write_csv(rows, str(path))
        assert len(path.read_text().splitlines()) == 4

    def test_roundtrip(self, tmp_path):
        result = run_experiment(ExperimentConfig(seed=8))
        path = tmp_path / "log.csv"
        write_csv(result.rows, str(path))
        assert read_csv(str(path)) == result.rows

    def test_same_seed_byte_identical(self, tmp_path):
        config = ExperimentConfig(seed=9)
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            write_csv(run_experiment(config).rows, str(path))
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_unwritable_path_has_context(self):
        with pytest.raises(OSError, match="no/such/dir"):
            write_csv([], "no/such/dir/log.csv")


class TestPlot:
    def test_writes_vector_file(self, tmp_path):
        result = run_experiment(ExperimentConfig(seed=10))
        path = tmp_path / "plot.svg"
        render_plot(result.rows, str(path))
        assert path.read_text().lstrip().startswith("<?xml")

    def test_empty_log_still_renders(self, tmp_path):
        path = tmp_path / "plot.svg"
        render_plot([], str(path))
        assert path.exists()


class TestConfig:
    def test_from_dict_nested(self):
        config = ExperimentConfig.from_dict({
            "scenario": "stationary",
            "seed": 3,
            "noise": {"step_mean_cm": 2.0, "step_std_cm": 0.1},
            "gait_timing": {"push_s": 1.0},
            "camera": {"pixel_noise_std": 0.5},
        })
        assert config.noise.step_mean_cm == (2.0,) * 5
        assert config.gait_timing.push_s == 1.0
        assert config.camera.pixel_noise_std == 0.5

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="warp_speed"):
            ExperimentConfig.from_dict({"warp_speed": 9})

    def test_initial_pose_degrees_to_radians(self):
        config = ExperimentConfig(initial_pose=(1.0, 2.0, 90.0))
        assert config.initial_pose2d().theta == pytest.approx(math.pi / 2)


class TestCli:
    def test_converged_run_exit_0(self, tmp_path, capsys):
        code = main(["--out-dir", str(tmp_path), "--seed", "1"])
        assert code == EXIT_CONVERGED
        assert (tmp_path / "stationary_log.csv").exists()
        assert (tmp_path / "stationary_summary.json").exists()
        summary = json.loads(capsys.readouterr().out)
        assert summary["converged"] is True

    def test_non_convergence_exit_2(self, tmp_path, capsys):
        code = main(["--out-dir", str(tmp_path), "--seed", "1", "--max-steps", "3"])
        assert code == EXIT_NOT_CONVERGED

    def test_bad_config_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["--config", str(bad)]) == EXIT_ERROR

    def test_config_file_with_overrides(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seed": 1, "goal_cm": [30.0, 0.0]}))
        out = tmp_path / "out"
        code = main(["--config", str(cfg), "--scenario", "stationary",
                     "--out-dir", str(out), "--plot"])
        assert code == EXIT_CONVERGED
        assert (out / "stationary_plot.svg").exists()

    def test_characterize_cli(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"characterize_samples": 50}))
        code = main(["--config", str(cfg), "--scenario", "characterize",
                     "--out-dir", str(tmp_path / "out")])
        assert code == EXIT_CONVERGED
        summary = json.loads(capsys.readouterr().out)
        assert set(summary["per_primitive"]) == {"0", "1", "2", "3", "4"}
