"""
Configuración compartida para tests pytest
"""
import logging

import numpy as np
import pytest
from typer.testing import CliRunner

from app.core.config import Settings, apply_settings, settings
from app.schemas.field import GridSpec
from app.services.oracle import default_config


@pytest.fixture(autouse=True)
def restore_settings():
    """La CLI modifica la configuración compartida: se restaura después de cada test"""
    snapshot = settings.model_dump()
    yield
    apply_settings(Settings(**snapshot))


@pytest.fixture(autouse=True)
def restore_logging():
    """Quita los handlers que instala el callback de la CLI (apuntan al stderr del runner)"""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in list(root.handlers):
        if type(handler) is logging.StreamHandler and handler not in handlers:
            root.removeHandler(handler)
    root.setLevel(level)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def figure_grid():
    """Grilla de las figuras: [−10, 10] con h = 0.01 (2001 puntos)"""
    return GridSpec.symmetric(10.0, 0.01)


@pytest.fixture
def small_box():
    """Caja chica para propagaciones rápidas: [−20, 20], h = 0.01, dt = 1e-4"""
    return default_config(3.0, half_width=20.0, h=0.01, dt=1e-4)


@pytest.fixture
def gaussian_scale():
    """Normalización de e^{−x²/4}: (2π)^{−1/4}"""
    return (2.0 * np.pi) ** -0.25
