"""Subcomando `replay`: vuelve a correr un RunManifest"""
import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional

import typer

from app.commands.common import handle_errors
from app.commands.fit import write_fit
from app.commands.oracle import write_oracle
from app.commands.psi import write_psi
from app.commands.survival import write_survival
from app.commands.verify import write_verify
from app.core.config import Settings, apply_settings, settings
from app.core.exceptions import ParameterError
from app.utils.export import read_manifest

logger = logging.getLogger(__name__)


def _fit_paths(**parameters) -> List[Path]:
    _, paths = write_fit(**parameters)
    return paths


def _verify_paths(**parameters) -> List[Path]:
    _, paths = write_verify(**parameters)
    return paths


REPLAYERS: Dict[str, Callable[..., List[Path]]] = {
    "psi": write_psi,
    "survival": write_survival,
    "fit": _fit_paths,
    "oracle": write_oracle,
    "verify": _verify_paths,
}


def replay_manifest(manifest_path: Path, out: Optional[Path] = None) -> List[Path]:
    """
    Reejecuta el comando del manifest con los mismos parámetros y la misma
    configuración efectiva (opcionalmente en otro directorio).

    La configuración vigente se restaura al terminar.
    """
    manifest = read_manifest(manifest_path)
    if manifest.command not in REPLAYERS:
        raise ParameterError(f"el comando {manifest.command!r} no se puede reejecutar")
    parameters = dict(manifest.parameters)
    if out is not None:
        parameters["out"] = out

    previous = settings.model_dump()
    if manifest.settings:
        unknown = sorted(set(manifest.settings) - set(Settings.model_fields))
        if unknown:
            raise ParameterError(f"{manifest_path}: claves de configuración desconocidas: {', '.join(unknown)}")
        apply_settings(Settings(**manifest.settings))
        logger.info(f"replay {manifest.command}: configuración restituida desde {manifest_path}")
    try:
        return REPLAYERS[manifest.command](**parameters)
    finally:
        apply_settings(Settings(**previous))


def cmd_replay(
    manifest: Path = typer.Option(..., "--manifest", help="Sidecar JSON de una corrida anterior"),
    out: Optional[Path] = typer.Option(None, "--out", help="Directorio de salida (default: el del manifest)"),
) -> None:
    """Reproduce una corrida a partir de su RunManifest"""
    with handle_errors("replay"):
        paths = replay_manifest(manifest, out)
    for path in paths:
        typer.echo(str(path))
