import json
import math

import numpy as np
import pytest

from src.config import reset_settings
from src.config.constants import EXIT_CONFIG_ERROR, EXIT_NUMERICAL_ERROR, EXIT_OK
from src.main import build_parser, cli_main

SMALL_PGD = """{
  "kind": "onebit-vs-linear", "p": 50, "n": 100, "s": 2,
  "link": {"kind": "sign"}, "regularizer": {"kind": "l1-ball"},
  "solver": {"name": "pgd", "max_iters": 20}, "trials": 2, "seed": 5, "timing": false
}"""

SMALL_RESAMPLED = """{
  "kind": "onebit-vs-linear", "p": 50, "n": 100, "s": 2,
  "link": {"kind": "sign"}, "regularizer": {"kind": "l1-ball"},
  "solver": {"name": "proxgd-resampled", "max_iters": 5, "rho": 0.9}, "seed": 7, "timing": false
}"""


def run_json(capsys, argv) -> dict:
    assert cli_main(argv) == EXIT_OK
    return json.loads(capsys.readouterr().out)


class TestParser:
    def test_commands(self):
        parser = build_parser()
        args = parser.parse_args(["bound", "--kind", "psgd", "--n", "400", "--n0", "10"])
        assert (args.command, args.kind, args.iters) == ("bound", "psgd", 200)

    def test_unknown_command(self):
        assert cli_main(["fit"]) == EXIT_CONFIG_ERROR

    def test_help(self, capsys):
        assert cli_main(["--help"]) == EXIT_OK
        assert "solve" in capsys.readouterr().out


class TestStats:
    def test_sign(self, capsys):
        data = run_json(capsys, ["stats", "--link", "sign"])
        assert data["mu"] == pytest.approx(math.sqrt(2 / math.pi))
        assert data["link"] == {"kind": "sign"}

    def test_bad_link(self):
        assert cli_main(["stats", "--link", "relu"]) == EXIT_CONFIG_ERROR


class TestN0:
    def test_grid_minimum(self, capsys):
        data = run_json(capsys, ["n0", "--reg", "l1", "--p", "500", "--s", "10", "--seed", "1"])
        assert {"n0", "lambda", "grid"} <= set(data)
        assert data["regularizer"] == {"kind": "l1-ball"}
        assert 60 <= data["n0"] <= 140

    def test_negative_lambda(self):
        argv = ["n0", "--reg", "l1", "--p", "10", "--s", "2", "--lam", "-1"]
        assert cli_main(argv) == EXIT_NUMERICAL_ERROR


class TestBound:
    def test_pgd_json(self, capsys):
        data = run_json(capsys, ["bound", "--kind", "pgd", "--n", "320", "--n0", "10", "--iters", "3"])
        assert data["valid"] is True
        assert data["rate"] == pytest.approx(0.5)
        assert data["values"][-1] == pytest.approx(0.125)

    def test_csv(self, tmp_path):
        out = tmp_path / "bound.csv"
        argv = ["bound", "--kind", "pgd", "--n", "320", "--n0", "10", "--iters", "2", "--out", str(out)]
        assert cli_main(argv) == EXIT_OK
        assert out.read_text().splitlines() == ["iter,bound", "0,1", "1,0.5", "2,0.25"]


class TestRunCommands:
    def test_missing_config(self, tmp_path):
        assert cli_main(["solve", "--config", str(tmp_path / "absent.json")]) == EXIT_CONFIG_ERROR

    def test_invalid_config(self, config_file):
        path = config_file('{"p": 10, "s": 20}')
        assert cli_main(["experiment", "--config", str(path)]) == EXIT_CONFIG_ERROR

    def test_solve(self, config_file, tmp_path):
        out = tmp_path / "solve"
        assert cli_main(["solve", "--config", str(config_file(SMALL_PGD)), "--out", str(out)]) == EXIT_OK
        rows = (out / "trace.csv").read_text().splitlines()
        assert rows[0] == "iter,error,residual,wall_ms"
        assert len(rows) == 22
        summary = json.loads((out / "summary.json").read_text())
        assert summary["solver"] == "pgd"
        assert summary["records"] == 21

    def test_solve_resampled(self, config_file, tmp_path):
        out = tmp_path / "prox"
        assert cli_main(["solve", "--config", str(config_file(SMALL_RESAMPLED)), "--out", str(out)]) == EXIT_OK
        schedule = (out / "schedule.csv").read_text().splitlines()
        assert schedule[0] == "iter,lambda_tau,M_tau"
        assert len(schedule) == 7
        assert (out / "trace.csv").is_file()

    def test_experiment(self, config_file, tmp_path):
        out = tmp_path / "exp"
        argv = ["experiment", "--config", str(config_file(SMALL_PGD)), "--out", str(out), "--trials", "3"]
        assert cli_main(argv) == EXIT_OK
        assert (out / "trial_002_onebit.csv").is_file()
        assert (out / "mean.csv").is_file()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["run"]["completed"] == 3
        assert summary["config"]["seed"] == 5

    def test_experiment_rejects_resampled(self, config_file):
        path = config_file(SMALL_RESAMPLED)
        assert cli_main(["experiment", "--config", str(path)]) == EXIT_CONFIG_ERROR


class TestValidate:
    def test_restricted_eigs(self, capsys):
        data = run_json(capsys, ["validate", "--lemma", "restricted-eigs", "--trials", "10", "--seed", "2"])
        assert data["lemma"] == "restricted-eigs"
        assert data["bound"] == pytest.approx(math.sqrt(8 / 64), rel=1e-2)


class TestExitCodes:
    def test_bad_environment_is_config_error(self, monkeypatch):
        monkeypatch.setenv("MC_SAMPLES", "abc")
        reset_settings()
        assert cli_main(["stats", "--link", "sign"]) == EXIT_CONFIG_ERROR

    @pytest.mark.parametrize("error", [ValueError("math domain error"), np.linalg.LinAlgError("singular")])
    def test_library_failure_is_numerical(self, monkeypatch, error):
        def failing(*args, **kwargs):
            raise error

        monkeypatch.setattr("src.main.link_stats", failing)
        assert cli_main(["stats", "--link", "sign"]) == EXIT_NUMERICAL_ERROR
