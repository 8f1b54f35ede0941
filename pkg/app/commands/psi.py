"""Subcomando `psi`: ψ(x, t) sobre una grilla, con sus curvas de referencia"""
import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import typer

from app.commands.common import (
    handle_errors,
    log_physical_scales,
    manifest_parameters,
    number_tag,
    output_dir,
    resolve_model,
)
from app.core.exceptions import ParameterError
from app.enums.psi_method import PsiMethod
from app.schemas.field import ComplexField, GridSpec
from app.services.bound_states import psi_bound_final, psi_initial
from app.services.exact import (
    propagate_by_kernel,
    psi_exact,
    psi_farfield,
    psi_longtime,
    psi_shorttime,
    sample_field,
)
from app.services.oracle import default_config, quench_experiment
from app.utils.export import field_frame, write_csv, write_manifest

logger = logging.getLogger(__name__)

CLOSED_FORMS: Dict[PsiMethod, Callable] = {
    PsiMethod.EXACT: psi_exact,
    PsiMethod.SHORTTIME: psi_shorttime,
    PsiMethod.LONGTIME: psi_longtime,
    PsiMethod.FARFIELD: psi_farfield,
}


def _kernel_field(grid: GridSpec, t: float, mu: float) -> ComplexField:
    x = grid.points()
    values = np.array([propagate_by_kernel(psi_initial, xi, t, mu) for xi in x])
    return ComplexField(grid=grid, values=values, time=t, mu=mu)


def _oracle_field(grid: GridSpec, t: float, mu: float) -> ComplexField:
    """Snapshot Crank-Nicolson interpolado sobre la grilla pedida"""
    config = default_config(mu)
    if grid.x_min < config.grid.x_min or grid.x_max > config.grid.x_max:
        raise ParameterError(
            f"la grilla pedida excede la caja del oráculo [{config.grid.x_min}, {config.grid.x_max}]"
        )
    snapshot = quench_experiment(config, [t], snapshot_times=[t]).snapshot_at(t)
    x = grid.points()
    values = np.interp(x, snapshot.x, snapshot.values.real) + 1j * np.interp(x, snapshot.x, snapshot.values.imag)
    return ComplexField(grid=grid, values=values, time=t, mu=mu)


def evaluate_field(grid: GridSpec, t: float, mu: float, method: PsiMethod) -> ComplexField:
    method = PsiMethod(method)
    if t == 0 or method in CLOSED_FORMS:
        return sample_field(CLOSED_FORMS.get(method, psi_exact), grid, t, mu, strict=False)
    if method == PsiMethod.KERNEL:
        return _kernel_field(grid, t, mu)
    return _oracle_field(grid, t, mu)


def write_psi(
    mu: Optional[float],
    t: float,
    xmin: float,
    xmax: float,
    nx: int,
    method: PsiMethod,
    out: Optional[Path],
    alpha: Optional[float] = None,
    lambda_: Optional[float] = None,
) -> List[Path]:
    """
    Escribe psi_mu{μ}_t{t}_{método}.csv y su manifest.

    Columnas: x, re_psi, im_psi, abs2, abs2_initial y, si μ > 0, abs2_bound_final.
    Con alpha y lambda_ el manifest guarda también el par físico.
    """
    method = PsiMethod(method)
    model = resolve_model(mu, alpha, lambda_)
    mu = model.mu
    log_physical_scales("psi", model, t, (xmin, xmax))
    grid = GridSpec(x_min=xmin, x_max=xmax, n_points=nx)
    field = evaluate_field(grid, t, mu, method)
    x = grid.points()
    extra = {"abs2_initial": np.abs(psi_initial(x, 0.0)) ** 2}
    if mu > 0:
        extra["abs2_bound_final"] = np.abs(psi_bound_final(x, 0.0, mu)) ** 2

    directory = output_dir(out)
    stem = f"psi_mu{number_tag(mu)}_t{number_tag(t)}_{method.value}"
    csv_path = write_csv(field_frame(field, extra), directory / f"{stem}.csv")
    parameters = manifest_parameters(
        mu=mu, t=t, xmin=xmin, xmax=xmax, nx=nx, method=method, out=directory, alpha=alpha, lambda_=lambda_
    )
    write_manifest("psi", parameters, [csv_path], directory / f"{stem}.json")
    return [csv_path, directory / f"{stem}.json"]


def cmd_psi(
    mu: Optional[float] = typer.Option(None, "--mu", help="Cociente de intensidades μ = λ/α"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Intensidad del pozo inicial (con --lambda)"),
    lambda_: Optional[float] = typer.Option(None, "--lambda", help="Intensidad del pozo final (con --alpha)"),
    t: float = typer.Option(..., "--t", help="Tiempo adimensional"),
    xmin: float = typer.Option(-10.0, "--xmin"),
    xmax: float = typer.Option(10.0, "--xmax"),
    nx: int = typer.Option(2001, "--nx", help="Cantidad de puntos (filas del CSV)"),
    method: PsiMethod = typer.Option(PsiMethod.EXACT, "--method", case_sensitive=False),
    out: Optional[Path] = typer.Option(None, "--out", help="Directorio de salida (default OUTPUT_DIR)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Reservado: el cálculo es determinista"),
) -> None:
    """ψ(x, t) sobre una grilla uniforme, como CSV + manifest JSON"""
    with handle_errors("psi"):
        paths = write_psi(mu, t, xmin, xmax, nx, method, out, alpha=alpha, lambda_=lambda_)
    for path in paths:
        typer.echo(str(path))
