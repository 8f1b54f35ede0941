from pathlib import Path
from typing import Any, List, Optional

from dotenv import dotenv_values
from pydantic import field_validator
from pydantic_settings import BaseSettings

from app.core.exceptions import ParameterError


class Settings(BaseSettings):
    PROJECT_NAME: str = "DeltaQuench"
    VERSION: str = "1.0.0"

    # Logging / output
    LOG_LEVEL: str = "INFO"
    OUTPUT_DIR: Path = Path("output")
    CSV_PRECISION: int = 15

    # Quadrature (kernel propagation and numeric overlaps)
    QUAD_EPSABS: float = 1e-8
    QUAD_LIMIT: int = 2000
    BOX_MARGIN: float = 40.0

    # Crank-Nicolson oracle
    ORACLE_DX: float = 0.005
    ORACLE_DT: float = 5e-5
    ORACLE_HALF_WIDTH: float = 60.0
    CAP_STRENGTH: float = 0.0
    CAP_WIDTH: float = 0.0
    ORACLE_L2_REL_TOL: float = 3e-2

    # Figure reproduction
    FIGURE_MU: float = 3.0
    FIGURE_TIMES: List[float] = [0.07, 0.2, 0.7, 100.0]
    FIGURE_X_HALF_WIDTH: float = 10.0
    FIGURE_NX: int = 2001

    @field_validator("LOG_LEVEL")
    @classmethod
    def known_level(cls, v):
        level = v.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"LOG_LEVEL desconocido: {v}")
        return level

    @field_validator("FIGURE_TIMES", mode="before")
    @classmethod
    def split_times(cls, v):
        # Los archivos key=value traen la lista como "0.07,0.2,0.7,100"
        if isinstance(v, str):
            return [float(item) for item in v.split(",") if item.strip()]
        return v

    class Config:
        env_file = ".env"
        case_sensitive = True


def load_settings(config_path: Optional[Path] = None, **overrides: Any) -> Settings:
    """
    Construye la configuración efectiva.

    Precedencia: flags de línea de comandos > archivo key=value (--config)
    > variables de entorno / .env > valores por defecto.

    Args:
        config_path: Archivo de texto plano con líneas KEY=value
        **overrides: Valores pasados por flags (los None se ignoran)

    Returns:
        Settings: Configuración validada
    """
    values: dict = {}
    if config_path is not None:
        if not Path(config_path).is_file():
            raise ParameterError(f"Archivo de configuración no encontrado: {config_path}")
        raw = dotenv_values(config_path)
        unknown = sorted(set(raw) - set(Settings.model_fields))
        if unknown:
            raise ParameterError(f"Claves desconocidas en {config_path}: {', '.join(unknown)}")
        values.update({key: value for key, value in raw.items() if value is not None})

    values.update({key: value for key, value in overrides.items() if value is not None})
    return Settings(**values)


settings = Settings()


def apply_settings(new: Settings) -> Settings:
    """Copia `new` sobre la instancia compartida que importan los servicios"""
    for name in Settings.model_fields:
        setattr(settings, name, getattr(new, name))
    return settings
