"""
Escritura de resultados: CSV con encabezado fijo y sidecars JSON.

Los números se escriben en notación científica con CSV_PRECISION cifras
significativas; los nulos (NaN) quedan como celdas vacías.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel

from app.core.config import settings
from app.core.exceptions import ParameterError
from app.schemas.field import ComplexField
from app.schemas.manifest import RunManifest

logger = logging.getLogger(__name__)

PSI_COLUMNS = ["x", "re_psi", "im_psi", "abs2"]
SURVIVAL_COLUMNS = ["t", "re_A", "im_A", "P", "one_minus_P"]


def float_format(precision: Optional[int] = None) -> str:
    precision = settings.CSV_PRECISION if precision is None else precision
    return f"%.{precision - 1}e"


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    """Escribe el DataFrame sin índice, NaN como celda vacía"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=float_format(), na_rep="")
    logger.info(f"CSV escrito: {path} ({len(frame)} filas)")
    return path


def field_frame(field: ComplexField, extra: Optional[Dict[str, np.ndarray]] = None) -> pd.DataFrame:
    """Columnas x, re_psi, im_psi, abs2 (+ columnas de referencia opcionales)"""
    values = field.values
    frame = pd.DataFrame(
        {
            "x": field.x,
            "re_psi": values.real,
            "im_psi": values.imag,
            "abs2": np.abs(values) ** 2,
        }
    )
    for name, column in (extra or {}).items():
        frame[name] = column
    return frame


def write_json(payload: Any, path: Path) -> Path:
    """Serializa un modelo pydantic (o un dict) a JSON indentado"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2, default=str)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def write_manifest(command: str, parameters: Dict[str, Any], outputs: Sequence[Path], path: Path) -> RunManifest:
    """
    Escribe el RunManifest; el propio sidecar también queda listado.

    Guarda la configuración efectiva completa (precisión del CSV, grilla del
    oráculo, tolerancias de cuadratura) para que `replay` la restituya.
    """
    path = Path(path)
    manifest = RunManifest(
        command=command,
        parameters=parameters,
        settings=settings.model_dump(mode="json"),
        version=settings.VERSION,
        outputs=[str(p) for p in [*outputs, path]],
    )
    write_json(manifest, path)
    return manifest


def read_manifest(path: Path) -> RunManifest:
    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"Manifest no encontrado: {path}")
    return RunManifest.model_validate_json(path.read_text(encoding="utf-8"))


def read_series(path: Path, time_column: str, value_column: str) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lee dos columnas numéricas de un CSV producido por la CLI.

    Raises:
        ParameterError: si el archivo o alguna de las columnas no existe
    """
    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"Archivo de serie no encontrado: {path}")
    frame = pd.read_csv(path)
    missing: List[str] = [c for c in (time_column, value_column) if c not in frame.columns]
    if missing:
        raise ParameterError(f"{path} no tiene las columnas {', '.join(missing)}")
    return frame[time_column].to_numpy(dtype=float), frame[value_column].to_numpy(dtype=float)
