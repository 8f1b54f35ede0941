"""Piezas compartidas por los subcomandos de la CLI"""
import logging
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Tuple

import numpy as np
import typer
from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import DeltaQuenchError, ParameterError
from app.enums.time_spacing import TimeSpacing
from app.schemas.model import ModelParams

logger = logging.getLogger(__name__)

EXIT_INVALID = 2


@contextmanager
def handle_errors(command: str) -> Iterator[None]:
    """Convierte los errores del paquete en un mensaje y código de salida 2"""
    try:
        yield
    except (DeltaQuenchError, ValidationError) as exc:
        logger.error(f"{command}: {exc}")
        typer.echo(f"Error: {exc}", err=True)
        raise typer.Exit(code=EXIT_INVALID)


def output_dir(out: Optional[Path]) -> Path:
    directory = Path(out) if out is not None else Path(settings.OUTPUT_DIR)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def time_grid(t_min: float, t_max: float, n: int, spacing: TimeSpacing) -> np.ndarray:
    """
    Muestras de tiempo lineales o logarítmicas entre t_min y t_max (inclusive).

    Raises:
        ParameterError: rango inválido, n < 2 o t_min <= 0 con espaciado log
    """
    if n < 2:
        raise ParameterError(f"se necesitan al menos 2 muestras, se pidió n={n}")
    if not 0 <= t_min < t_max:
        raise ParameterError(f"rango de tiempos inválido: [{t_min}, {t_max}]")
    if TimeSpacing(spacing) == TimeSpacing.LOG:
        if t_min <= 0:
            raise ParameterError("el espaciado logarítmico requiere t_min > 0")
        return np.logspace(np.log10(t_min), np.log10(t_max), n)
    return np.linspace(t_min, t_max, n)


def number_tag(value: float) -> str:
    """Etiqueta estable para nombres de archivo: 0.07 -> 0p07"""
    return f"{value:g}".replace(".", "p").replace("-", "m")


def manifest_parameters(**parameters: Any) -> Dict[str, Any]:
    """Parámetros serializables (Path y Enum como texto) para el RunManifest"""
    clean: Dict[str, Any] = {}
    for key, value in parameters.items():
        if isinstance(value, Enum):
            value = value.value
        elif isinstance(value, Path):
            value = str(value)
        elif isinstance(value, (list, tuple)):
            value = [v.value if isinstance(v, Enum) else v for v in value]
        clean[key] = value
    return clean


def resolve_model(mu: Optional[float], alpha: Optional[float], lambda_: Optional[float]) -> ModelParams:
    """
    Arma los parámetros del quench desde --mu o desde el par físico --alpha/--lambda.

    Si vienen los tres, μ tiene que coincidir con λ/α.

    Raises:
        ParameterError: falta μ y el par está incompleto, o α <= 0
    """
    if alpha is None and lambda_ is None:
        if mu is None:
            raise ParameterError("indicar --mu o el par --alpha/--lambda")
        return ModelParams(mu=mu)
    if alpha is None or lambda_ is None:
        raise ParameterError("--alpha y --lambda se indican juntos")
    if alpha <= 0:
        raise ParameterError(f"alpha debe ser positivo, se pidió {alpha}")
    if mu is not None:
        return ModelParams(mu=mu, alpha=alpha, lambda_=lambda_)
    return ModelParams.from_physical(alpha, lambda_)


def log_physical_scales(
    command: str, model: ModelParams, t: float, x_range: Optional[Tuple[float, float]] = None
) -> None:
    unit_map = model.unit_map
    if unit_map is None:
        return
    _, t_physical = unit_map.to_physical(0.0, t)
    message = f"{command}: α={model.alpha}, λ={model.lambda_} -> μ={model.mu:g}; t físico hasta {t_physical:g}"
    if x_range is not None:
        x_lo, _ = unit_map.to_physical(x_range[0], t)
        x_hi, _ = unit_map.to_physical(x_range[1], t)
        message += f", x físico en [{x_lo:g}, {x_hi:g}]"
    logger.info(message)
