"""Subcomando `survival`: A(t), P(t) y sus aproximaciones sobre una grilla de tiempos"""
import logging
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
import typer

from app.commands.common import (
    handle_errors,
    log_physical_scales,
    manifest_parameters,
    number_tag,
    output_dir,
    resolve_model,
    time_grid,
)
from app.enums.survival_method import SurvivalMethod
from app.enums.time_spacing import TimeSpacing
from app.schemas.survival import SurvivalSeries
from app.services.oracle import default_config, quench_experiment
from app.services.survival import (
    escape_probability_shorttime,
    survival_probability_limit,
    survival_probability_longtime,
    survival_series,
)
from app.utils.export import write_csv, write_manifest

logger = logging.getLogger(__name__)


def build_series(times: np.ndarray, mu: float, method: SurvivalMethod) -> SurvivalSeries:
    method = SurvivalMethod(method)
    if method == SurvivalMethod.ORACLE:
        return quench_experiment(default_config(mu), times).series
    return survival_series(times, mu, method)


def survival_frame(series: SurvivalSeries) -> pd.DataFrame:
    """t, re_A, im_A, P, one_minus_P, P_inf, one_minus_P_short, P_long"""
    times = series.times
    mu = series.mu
    p_long = np.full(times.shape, np.nan)
    late = times > 0
    if mu > 0 and np.any(late):
        p_long[late] = survival_probability_longtime(times[late], mu, strict=False)
    return pd.DataFrame(
        {
            "t": times,
            "re_A": series.amplitudes.real,
            "im_A": series.amplitudes.imag,
            "P": series.probabilities,
            "one_minus_P": series.escape(),
            "P_inf": np.full(times.shape, survival_probability_limit(mu)),
            "one_minus_P_short": escape_probability_shorttime(times, mu, strict=False),
            "P_long": p_long,
        }
    )


def write_survival(
    mu: Optional[float],
    t_min: float,
    t_max: float,
    n: int,
    spacing: TimeSpacing,
    method: SurvivalMethod,
    out: Optional[Path],
    alpha: Optional[float] = None,
    lambda_: Optional[float] = None,
) -> List[Path]:
    """Escribe survival_mu{μ}_{método}.csv y su manifest"""
    method = SurvivalMethod(method)
    model = resolve_model(mu, alpha, lambda_)
    mu = model.mu
    log_physical_scales("survival", model, t_max)
    spacing = TimeSpacing(spacing)
    times = time_grid(t_min, t_max, n, spacing)
    series = build_series(times, mu, method)

    directory = output_dir(out)
    stem = f"survival_mu{number_tag(mu)}_{method.value}_{spacing.value}"
    csv_path = write_csv(survival_frame(series), directory / f"{stem}.csv")
    parameters = manifest_parameters(
        mu=mu,
        t_min=t_min,
        t_max=t_max,
        n=n,
        spacing=spacing,
        method=method,
        out=directory,
        alpha=alpha,
        lambda_=lambda_,
    )
    write_manifest("survival", parameters, [csv_path], directory / f"{stem}.json")
    return [csv_path, directory / f"{stem}.json"]


def cmd_survival(
    mu: Optional[float] = typer.Option(None, "--mu", help="Cociente de intensidades μ = λ/α"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Intensidad del pozo inicial (con --lambda)"),
    lambda_: Optional[float] = typer.Option(None, "--lambda", help="Intensidad del pozo final (con --alpha)"),
    t_min: float = typer.Option(0.0, "--t-min"),
    t_max: float = typer.Option(20.0, "--t-max"),
    n: int = typer.Option(2001, "--n", help="Cantidad de tiempos"),
    spacing: TimeSpacing = typer.Option(TimeSpacing.LINEAR, "--spacing", case_sensitive=False),
    method: SurvivalMethod = typer.Option(SurvivalMethod.EXACT, "--method", case_sensitive=False),
    out: Optional[Path] = typer.Option(None, "--out", help="Directorio de salida (default OUTPUT_DIR)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Reservado: el cálculo es determinista"),
) -> None:
    """Serie de supervivencia A(t), P(t) como CSV + manifest JSON"""
    with handle_errors("survival"):
        paths = write_survival(mu, t_min, t_max, n, spacing, method, out, alpha=alpha, lambda_=lambda_)
    for path in paths:
        typer.echo(str(path))
