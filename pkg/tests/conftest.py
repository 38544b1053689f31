"""
Общие фикстуры тестов
"""

import pytest

from src.config import reset_settings
from src.gaussian import make_rng
from src.solvers import sparse_unit_vector


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Настройки из чистого окружения с результатами во временной директории"""
    for name in ("DEFAULT_SEED", "STEP_RULE", "LAMBDA_GRID_SIZE", "LAMBDA_GRID_MIN",
                 "LAMBDA_GRID_MAX", "MAX_WORKERS", "LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("RESULTS_DIR", str(tmp_path / "results"))
    monkeypatch.setenv("MC_SAMPLES", "20000")
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def sparse_theta():
    """θ* с s = 5 при p = 100"""
    return sparse_unit_vector(100, 5, make_rng(11))


def write_config(path, text: str):
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def config_file(tmp_path):
    def make(text: str, name: str = "config.json"):
        return write_config(tmp_path / name, text)
    return make
