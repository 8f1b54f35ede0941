"""Subcomando `figures`: datos de las tres figuras con los parámetros de referencia"""
from pathlib import Path
from typing import List, Optional

import typer

from app.commands.common import handle_errors
from app.commands.psi import write_psi
from app.commands.survival import write_survival
from app.core.config import settings
from app.core.exceptions import ParameterError
from app.enums.psi_method import PsiMethod
from app.enums.survival_method import SurvivalMethod
from app.enums.time_spacing import TimeSpacing


def write_figure(which: int, out: Optional[Path]) -> List[Path]:
    """
    1: ψ(x, t) a los tiempos FIGURE_TIMES; 2: P(t) en [0, 20];
    3: 1 − P(t) y su aproximación de tiempos cortos en [1e-4, 1e-1] (log).
    """
    mu = settings.FIGURE_MU
    if which == 1:
        paths: List[Path] = []
        half = settings.FIGURE_X_HALF_WIDTH
        for t in settings.FIGURE_TIMES:
            paths.extend(write_psi(mu, t, -half, half, settings.FIGURE_NX, PsiMethod.EXACT, out))
        return paths
    if which == 2:
        return write_survival(mu, 0.0, 20.0, 2001, TimeSpacing.LINEAR, SurvivalMethod.EXACT, out)
    if which == 3:
        return write_survival(mu, 1e-4, 1e-1, 301, TimeSpacing.LOG, SurvivalMethod.EXACT, out)
    raise ParameterError(f"figura desconocida: {which} (1, 2 o 3)")


def cmd_figures(
    which: int = typer.Option(..., "--which", help="Figura: 1, 2 o 3"),
    out: Optional[Path] = typer.Option(None, "--out", help="Directorio de salida (default OUTPUT_DIR)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Reservado: el cálculo es determinista"),
) -> None:
    """Alias de psi/survival con μ = FIGURE_MU y los tiempos de las figuras"""
    with handle_errors("figures"):
        paths = write_figure(which, out)
    for path in paths:
        typer.echo(str(path))
