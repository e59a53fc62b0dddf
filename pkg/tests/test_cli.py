import itertools
import json

import pytest

from src.cli.config import ExperimentConfig, ModelBlock, load_config
from src.cli.runner import logger as runner_logger
from src.cli.runner import run
from src.errors import ConfigError
from src.main import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, main
from src.observability.metrics import get_metrics_collector

GG_MODEL = {
    "tau0": {"family": "gengamma", "alpha": 0.4, "theta": 1.0, "zeta": 0.5},
    "groups": [
        {"family": "gengamma", "alpha": 0.3, "theta": 1.0, "zeta": 0.2},
        {"family": "gengamma", "alpha": 0.6, "theta": 2.0, "zeta": 0.1},
    ],
    "gammas": [1.0, 1.5],
}


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


class TestConfig:
    def test_bundled_experiments_load(self):
        config = load_config("data/experiments/verify_duality_gg.json")
        assert config.task == "verify-duality"
        assert config.sweep_totals() == [(3, 2)]

    def test_json_errors_carry_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "task": "sample",\n  "draws": \n}', encoding="utf-8")
        with pytest.raises(ConfigError) as exc:
            load_config(path)
        assert "line 4" in str(exc.value)

    def test_field_errors_carry_path(self, tmp_path):
        bad = {**GG_MODEL, "tau0": {"family": "gama", "theta": 1.0, "zeta": 1.0}}
        path = write_config(tmp_path, {"task": "verify-duality", "model": bad, "totals": [[1, 1]]})
        with pytest.raises(ConfigError) as exc:
            load_config(path)
        assert "model.tau0" in str(exc.value)

    def test_totals_must_match_groups(self):
        with pytest.raises(ValueError):
            ExperimentConfig.model_validate(
                {"task": "normalize", "model": GG_MODEL, "totals": [[1, 1, 1]]}
            )

    def test_max_total_grid(self):
        config = ExperimentConfig.model_validate(
            {"task": "normalize", "model": GG_MODEL, "totals": [[1, 1]], "max_total": 3}
        )
        assert config.sweep_totals() == [(1, 1), (1, 2), (2, 1)]

    def test_common_time_from_zeta(self):
        block = ModelBlock.model_validate({**GG_MODEL, "gammas": None, "zeta": 2.0})
        hier = block.hier()
        assert hier.species_mass == pytest.approx(2.0, rel=1e-10)
        assert hier.gammas[0] == hier.gammas[1]

    def test_times_or_zeta(self):
        with pytest.raises(ValueError):
            ModelBlock.model_validate({**GG_MODEL, "zeta": 1.0})

    def test_seed_override(self):
        config = ExperimentConfig.model_validate(
            {"task": "sample", "model": GG_MODEL, "seeds": [1, 2]}
        )
        assert config.with_seed(9).seeds == [9]
        assert config.with_seed(None).seeds == [1, 2]


class TestMain:
    def test_passing_sweep(self, tmp_path):
        path = write_config(
            tmp_path, {"task": "verify-duality", "model": GG_MODEL, "totals": [[2, 1]]}
        )
        out = tmp_path / "out"
        assert main(["verify-duality", "--config", str(path), "--out", str(out)]) == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        assert report["task"] == "verify-duality"
        assert report["config_count"] > 0
        lines = (out / "duality.csv").read_text().splitlines()
        assert lines[0].startswith("# ")
        assert lines[1].startswith("label,config_id,r,K_tilde")

    def test_failed_criterion_exit_code(self, tmp_path):
        # a few hundred draws cannot meet the total-variation tolerance
        path = write_config(
            tmp_path,
            {"task": "mc-compare", "model": GG_MODEL, "seeds": [3], "draws": 300},
        )
        code = main(["mc-compare", "--config", str(path), "--out", str(tmp_path / "out")])
        assert code == EXIT_FAILED

    def test_config_errors_exit_code(self, tmp_path, capsys):
        bad = {**GG_MODEL, "tau0": {"family": "stabel", "alpha": 0.5}}
        path = write_config(tmp_path, {"task": "sample", "model": bad, "seeds": [1]})
        assert main(["sample", "--config", str(path)]) == EXIT_CONFIG
        assert "config error" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["sample", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG

    def test_task_mismatch(self, tmp_path):
        path = write_config(tmp_path, {"task": "sample", "model": GG_MODEL, "seeds": [1]})
        assert main(["verify-duality", "--config", str(path)]) == EXIT_CONFIG

    def test_bad_seed_argument(self, tmp_path):
        path = write_config(tmp_path, {"task": "sample", "model": GG_MODEL, "seeds": [1]})
        with pytest.raises(SystemExit):
            main(["sample", "--config", str(path), "--seed", "-3"])

    def test_sample_reruns_are_byte_identical(self, tmp_path):
        path = write_config(
            tmp_path, {"task": "sample", "model": GG_MODEL, "seeds": [42], "draws": 25}
        )
        for name in ("a", "b"):
            argv = ["sample", "--config", str(path), "--out", str(tmp_path / name)]
            assert main(argv) == EXIT_OK
        files = sorted(p.name for p in (tmp_path / "a").iterdir())
        assert "draws-42.jsonl" in files and "samples.csv" in files
        for name in files:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_seed_flag_replaces_config_seeds(self, tmp_path):
        path = write_config(
            tmp_path, {"task": "sample", "model": GG_MODEL, "seeds": [42], "draws": 5}
        )
        out = tmp_path / "out"
        assert main(["sample", "--config", str(path), "--out", str(out), "--seed", "7"]) == 0
        assert (out / "draws-7.jsonl").exists()
        assert not (out / "draws-42.jsonl").exists()


class TestRunner:
    def test_wall_clock_only_when_requested(self, tmp_path, mocker):
        mocker.patch(
            "src.observability.metrics.time.perf_counter",
            side_effect=itertools.count(start=0.0, step=0.25),
        )
        data = {"task": "verify-duality", "model": GG_MODEL, "totals": [[1, 1]]}
        timed = ExperimentConfig.model_validate({**data, "record_wall_clock": True})
        outcome = run(timed, tmp_path / "timed")
        assert outcome.report.wall_clock_ms is not None
        assert outcome.report.wall_clock_ms > 0.0
        assert outcome.report.wall_clock_ms % 250.0 == pytest.approx(0.0)

        plain = run(ExperimentConfig.model_validate(data), tmp_path / "plain")
        assert plain.report.wall_clock_ms is None

    def test_shards_merge_to_one_report(self, tmp_path):
        config = ExperimentConfig.model_validate(
            {"task": "normalize", "model": GG_MODEL, "max_total": 3}
        )
        outcome = run(config, tmp_path)
        labels = {row.label for row in outcome.report.normalization}
        assert labels == {"n=1,1", "n=1,2", "n=2,1"}
        assert outcome.exit_code == 0
        assert outcome.metrics["counters"]["shards"] == 3
        assert outcome.metrics["counters"]["files"] == len(outcome.files)
        assert set(outcome.metrics["stages"]) == {"execute", "write"}

    def test_run_context_is_cleared(self, tmp_path):
        config = ExperimentConfig.model_validate(
            {"task": "verify-duality", "model": GG_MODEL, "totals": [[1, 1]]}
        )
        run(config, tmp_path)
        assert runner_logger.context == {}

    def test_collector_tracks_runs(self, tmp_path):
        config = ExperimentConfig.model_validate(
            {"task": "verify-duality", "model": GG_MODEL, "totals": [[1, 1]]}
        )
        outcome = run(config, tmp_path)
        tracked = get_metrics_collector().get_run(outcome.metrics["run_id"])
        assert tracked is not None and tracked.task == "verify-duality"
        assert tracked.counters["shards"] == 1

    def test_outputs_can_be_switched_off(self, tmp_path):
        config = ExperimentConfig.model_validate(
            {
                "task": "sample",
                "model": GG_MODEL,
                "seeds": [1],
                "draws": 3,
                "outputs": {"tables": False, "draws": False},
            }
        )
        outcome = run(config, tmp_path)
        assert [p.name for p in outcome.files] == ["report.json"]

    def test_stable_master_task(self, tmp_path):
        config = ExperimentConfig.model_validate(
            {
                "task": "stable-master",
                "stable": [{"alpha": 0.6, "beta": 0.3}],
                "n_max": 3,
                "zetas": [1.0],
                "mixing_n_max": 4,
            }
        )
        outcome = run(config, tmp_path)
        assert outcome.report.passed, outcome.report.failed_criteria()
        assert (tmp_path / "criteria.csv").exists()
