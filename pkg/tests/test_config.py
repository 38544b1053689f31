from pathlib import Path

import numpy as np
import pytest

from src.config import Settings, get_settings, reset_settings
from src.config.experiment import ExperimentConfig
from src.exceptions import ConfigError
from src.geometry import Regularizer
from src.links import Link


class TestSettings:
    def test_from_env(self, monkeypatch, tmp_path):
        monkeypatch.setenv("DEFAULT_SEED", "7")
        monkeypatch.setenv("STEP_RULE", "n")
        monkeypatch.setenv("RESULTS_DIR", str(tmp_path / "out"))
        reset_settings()
        settings = get_settings()
        assert settings.default_seed == 7
        assert settings.step_rule == "n"
        assert settings.results_dir == tmp_path / "out"
        assert settings.results_dir.is_dir()

    def test_singleton(self):
        assert get_settings() is get_settings()

    def test_unparsable_env(self, monkeypatch):
        monkeypatch.setenv("MC_SAMPLES", "many")
        with pytest.raises(ValueError):
            Settings.from_env()

    @pytest.mark.parametrize("changes", [
        {"step_rule": "fixed"},
        {"mc_samples": 0},
        {"lambda_grid_min": 2.0, "lambda_grid_max": 1.0},
        {"max_workers": 0},
    ])
    def test_validate(self, tmp_path, changes):
        settings = Settings(base_dir=tmp_path, **changes)
        with pytest.raises(ValueError):
            settings.validate()

    def test_lambda_grid(self, tmp_path):
        grid = Settings(base_dir=tmp_path, lambda_grid_size=3, lambda_grid_min=0.1,
                        lambda_grid_max=10.0).lambda_grid()
        assert grid == pytest.approx([0.1, 1.0, 10.0])


FULL_CONFIG = """{
  "kind": "onebit-vs-linear",
  "p": 100,
  "n": 60,
  "s": 3,
  "link": {"kind": "quantize", "levels": 8, "clip": 2.0},
  "regularizer": {"kind": "l1-ball"},
  "solver": {"name": "proxgd", "max_iters": 50, "rho": 0.9, "lambda0": 0.5},
  "trials": 4,
  "seed": 11,
  "timing": false
}"""


class TestExperimentConfig:
    def test_defaults(self):
        config = ExperimentConfig()
        assert config.sparsity == 10
        assert config.samples == 250
        assert config.link == Link.sign()
        assert config.dims_for(200) == {"p": 200, "n": 800, "s": 20}

    def test_full_config(self):
        config = ExperimentConfig.loads(FULL_CONFIG)
        assert config.p == 100 and config.samples == 60 and config.sparsity == 3
        assert config.link == Link.quantize(8, 2.0)
        assert config.regularizer == Regularizer.l1_ball()
        assert config.solver == "proxgd"
        assert config.solver_config.max_iters == 50
        assert config.solver_options == {"rho": 0.9, "lambda0": 0.5}
        assert config.timing is False

    def test_round_trip(self):
        config = ExperimentConfig.loads(FULL_CONFIG)
        assert ExperimentConfig.from_dict(config.to_dict()) == config

    def test_solver_as_string(self):
        assert ExperimentConfig.loads('{"solver": "psgd"}').solver == "psgd"

    def test_syntax_error_has_position(self):
        with pytest.raises(ConfigError) as e:
            ExperimentConfig.loads('{\n  "p": 100,,\n}')
        assert e.value.line == 2
        assert "колонка" in e.value.detail

    def test_unknown_field_has_line(self):
        with pytest.raises(ConfigError) as e:
            ExperimentConfig.loads('{\n  "p": 100,\n  "bogus": 1\n}')
        assert e.value.line == 3
        assert e.value.field == "bogus"

    def test_nested_error_has_field_path(self):
        with pytest.raises(ConfigError) as e:
            ExperimentConfig.loads('{\n  "p": 100,\n  "link": {"kind": "relu"}\n}')
        assert e.value.field == "link.kind"
        assert e.value.line == 3

    def test_wrong_type(self):
        with pytest.raises(ConfigError) as e:
            ExperimentConfig.loads('{"p": 10.5}')
        assert e.value.field == "p"

    @pytest.mark.parametrize("text, field", [
        ('{"kind": "fig9"}', "kind"),
        ('{"solver": "adam"}', "solver.name"),
        ('{"p": 10, "s": 20}', "s"),
        ('{"eta": 0}', "eta"),
        ('{"solver": {"name": "pgd", "momentum": 0.9}}', "solver.momentum"),
    ])
    def test_invalid_values(self, text, field):
        with pytest.raises(ConfigError) as e:
            ExperimentConfig.loads(text)
        assert e.value.field == field

    def test_not_an_object(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.loads("[1, 2]")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.load(tmp_path / "absent.json")

    def test_overrides(self, tmp_path):
        config = ExperimentConfig().with_overrides(seed=5, out=tmp_path, trials=2)
        assert (config.seed, config.out, config.trials) == (5, Path(tmp_path), 2)
        assert ExperimentConfig().with_overrides() == ExperimentConfig()

    def test_default_output_dir(self):
        assert ExperimentConfig().output_dir == get_settings().results_dir / "onebit-vs-linear"

    def test_custom_link_from_registry(self):
        config = ExperimentConfig.loads('{"link": {"kind": "custom", "name": "clip"}}',
                                        registry={"clip": lambda z: np.clip(z, -1, 1)})
        assert config.link.kind == "custom"
