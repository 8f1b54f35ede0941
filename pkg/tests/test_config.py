"""
Tests de la configuración: precedencia de fuentes y validación
"""
from pathlib import Path

import pytest
from pydantic import ValidationError

from app.core.config import Settings, apply_settings, load_settings, settings
from app.core.exceptions import ParameterError


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "deltaquench.env"
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults():
    """
    Test: valores de escritorio por defecto
    """
    defaults = Settings()
    assert defaults.ORACLE_DX == 0.005
    assert defaults.ORACLE_DT == 5e-5
    assert defaults.FIGURE_MU == 3.0
    assert defaults.FIGURE_TIMES == [0.07, 0.2, 0.7, 100.0]
    assert defaults.CSV_PRECISION == 15


def test_config_file_values(tmp_path):
    path = _write(tmp_path, "ORACLE_DX=0.01\nFIGURE_TIMES=0.1,0.5\n# comentario\nOUTPUT_DIR=results\n")
    loaded = load_settings(path)
    assert loaded.ORACLE_DX == 0.01
    assert loaded.FIGURE_TIMES == [0.1, 0.5]
    assert loaded.OUTPUT_DIR == Path("results")


def test_precedence(tmp_path, monkeypatch):
    """
    Test: flags > archivo > entorno > defaults
    """
    monkeypatch.setenv("ORACLE_DT", "1e-4")
    monkeypatch.setenv("ORACLE_DX", "0.02")
    assert load_settings().ORACLE_DT == 1e-4

    path = _write(tmp_path, "ORACLE_DT=2e-4\nLOG_LEVEL=DEBUG\n")
    loaded = load_settings(path, LOG_LEVEL="ERROR")
    assert loaded.ORACLE_DT == 2e-4
    assert loaded.ORACLE_DX == 0.02
    assert loaded.LOG_LEVEL == "ERROR"
    # los flags en None no pisan nada
    assert load_settings(path, LOG_LEVEL=None).LOG_LEVEL == "DEBUG"


def test_unknown_key_and_missing_file(tmp_path):
    with pytest.raises(ParameterError):
        load_settings(_write(tmp_path, "ORACLE_DX=0.01\nGRID_SIZE=10\n"))
    with pytest.raises(ParameterError):
        load_settings(tmp_path / "missing.env")


def test_log_level_validation():
    assert Settings(LOG_LEVEL="debug").LOG_LEVEL == "DEBUG"
    with pytest.raises(ValidationError):
        Settings(LOG_LEVEL="verbose")


def test_invalid_number_in_file(tmp_path):
    with pytest.raises(ValidationError):
        load_settings(_write(tmp_path, "ORACLE_DX=fino\n"))


def test_apply_settings_updates_shared_instance():
    """
    Test: los servicios ven la configuración aplicada por la CLI
    """
    apply_settings(Settings(ORACLE_L2_REL_TOL=0.05))
    assert settings.ORACLE_L2_REL_TOL == 0.05
