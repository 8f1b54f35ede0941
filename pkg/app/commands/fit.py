"""Subcomando `fit`: ley de potencias sobre 1 − P(t) o sobre la envolvente de |P − P(∞)|"""
import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import typer

from app.commands.common import handle_errors, manifest_parameters, number_tag, output_dir, time_grid
from app.core.exceptions import ParameterError
from app.enums.fit_quantity import FitQuantity
from app.enums.time_spacing import TimeSpacing
from app.schemas.survival import FitReport
from app.services.survival import (
    escape_probability,
    fit_power_law,
    probability_envelope,
    survival_probability,
)
from app.utils.export import read_series, write_json, write_manifest

logger = logging.getLogger(__name__)

# (t_min, t_max, n, espaciado, ventana) para generar la serie cuando no hay --input
GENERATION_DEFAULTS = {
    FitQuantity.ESCAPE: (1e-5, 1e-1, 401, TimeSpacing.LOG, (1e-4, 1e-2)),
    FitQuantity.ENVELOPE: (10.0, 220.0, 42001, TimeSpacing.LINEAR, (20.0, 200.0)),
}


def _samples_from_file(path: Path, quantity: FitQuantity, mu: Optional[float]) -> Tuple[np.ndarray, np.ndarray]:
    if quantity == FitQuantity.ESCAPE:
        return read_series(path, "t", "one_minus_P")
    if mu is None:
        raise ParameterError("la envolvente de un archivo necesita --mu para calcular P(∞)")
    times, probabilities = read_series(path, "t", "P")
    return probability_envelope(times, probabilities, mu)


def _generated_samples(
    quantity: FitQuantity, mu: float, t_min: float, t_max: float, n: int, spacing: TimeSpacing
) -> Tuple[np.ndarray, np.ndarray]:
    times = time_grid(t_min, t_max, n, spacing)
    if quantity == FitQuantity.ESCAPE:
        return times, np.asarray(escape_probability(times, mu))
    return probability_envelope(times, np.asarray(survival_probability(times, mu)), mu)


def run_fit(
    quantity: FitQuantity,
    input_path: Optional[Path],
    mu: Optional[float],
    window: Optional[Tuple[float, float]],
    exponent: Optional[float],
    t_min: Optional[float] = None,
    t_max: Optional[float] = None,
    n: Optional[int] = None,
    spacing: Optional[TimeSpacing] = None,
) -> FitReport:
    """
    Ajusta la ley de potencias pedida.

    Args:
        quantity: escape (1 − P) o envelope (máximos de |P − P(∞)|)
        input_path: CSV de `survival`; si es None la serie se genera con μ
        mu: necesario para generar la serie o para la envolvente de un archivo
        window: ventana de ajuste; default (1e-4, 1e-2) o (20, 200) según quantity
        exponent: si se da, pendiente fija
    """
    quantity = FitQuantity(quantity)
    d_min, d_max, d_n, d_spacing, d_window = GENERATION_DEFAULTS[quantity]
    window = tuple(window) if window is not None else d_window
    if input_path is not None:
        times, values = _samples_from_file(Path(input_path), quantity, mu)
        source = str(input_path)
    else:
        if mu is None:
            raise ParameterError("sin --input hay que indicar --mu para generar la serie")
        times, values = _generated_samples(
            quantity,
            mu,
            d_min if t_min is None else t_min,
            d_max if t_max is None else t_max,
            d_n if n is None else n,
            d_spacing if spacing is None else TimeSpacing(spacing),
        )
        source = "generated"
    fit = fit_power_law(times, values, window, exponent=exponent)
    logger.info(f"fit {quantity.value}: exponente {fit.exponent:.4f}, coeficiente {fit.coefficient:.4f}")
    return FitReport(quantity=quantity, source=source, mu=mu, fit=fit)


def write_fit(
    quantity: FitQuantity,
    input_path: Optional[Path],
    mu: Optional[float],
    window_lo: Optional[float],
    window_hi: Optional[float],
    exponent: Optional[float],
    t_min: Optional[float],
    t_max: Optional[float],
    n: Optional[int],
    spacing: Optional[TimeSpacing],
    out: Optional[Path],
) -> Tuple[FitReport, List[Path]]:
    """Escribe fit_{cantidad}[_mu{μ}].json y su manifest"""
    if (window_lo is None) != (window_hi is None):
        raise ParameterError("--window-lo y --window-hi van juntos")
    window = (window_lo, window_hi) if window_lo is not None else None
    report = run_fit(quantity, input_path, mu, window, exponent, t_min, t_max, n, spacing)
    directory = output_dir(out)
    tag = f"_mu{number_tag(mu)}" if mu is not None else ""
    stem = f"fit_{report.quantity.value}{tag}"
    json_path = write_json(report, directory / f"{stem}.json")
    parameters = manifest_parameters(
        quantity=quantity,
        input_path=input_path,
        mu=mu,
        window_lo=window_lo,
        window_hi=window_hi,
        exponent=exponent,
        t_min=t_min,
        t_max=t_max,
        n=n,
        spacing=spacing,
        out=directory,
    )
    manifest_path = directory / f"{stem}.manifest.json"
    write_manifest("fit", parameters, [json_path], manifest_path)
    return report, [json_path, manifest_path]


def cmd_fit(
    quantity: FitQuantity = typer.Option(FitQuantity.ESCAPE, "--quantity", case_sensitive=False),
    input_path: Optional[Path] = typer.Option(None, "--input", help="CSV producido por `survival`"),
    mu: Optional[float] = typer.Option(None, "--mu", help="μ para generar la serie (o P(∞) de la envolvente)"),
    window_lo: Optional[float] = typer.Option(None, "--window-lo"),
    window_hi: Optional[float] = typer.Option(None, "--window-hi"),
    exponent: Optional[float] = typer.Option(None, "--exponent", help="Fija la pendiente y ajusta sólo el coeficiente"),
    t_min: Optional[float] = typer.Option(None, "--t-min"),
    t_max: Optional[float] = typer.Option(None, "--t-max"),
    n: Optional[int] = typer.Option(None, "--n"),
    spacing: Optional[TimeSpacing] = typer.Option(None, "--spacing", case_sensitive=False),
    out: Optional[Path] = typer.Option(None, "--out", help="Directorio de salida (default OUTPUT_DIR)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Reservado: el cálculo es determinista"),
) -> None:
    """Ajuste log-log por mínimos cuadrados; escribe un reporte JSON"""
    with handle_errors("fit"):
        report, paths = write_fit(
            quantity, input_path, mu, window_lo, window_hi, exponent, t_min, t_max, n, spacing, out
        )
    typer.echo(f"exponent={report.fit.exponent:.6f} coefficient={report.fit.coefficient:.6g}")
    for path in paths:
        typer.echo(str(path))
