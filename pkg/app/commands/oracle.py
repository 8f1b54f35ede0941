"""Subcomando `oracle`: corrida Crank-Nicolson del quench y comparación con la solución exacta"""
import logging
from pathlib import Path
from typing import List, Optional

import numpy as np
import typer

from app.commands.common import handle_errors, manifest_parameters, number_tag, output_dir
from app.commands.survival import survival_frame
from app.core.config import settings
from app.core.exceptions import ParameterError
from app.services.exact import psi_exact, sample_field
from app.services.oracle import compare_fields, default_config, quench_experiment
from app.services.survival import survival_probability
from app.utils.export import field_frame, write_csv, write_json, write_manifest

logger = logging.getLogger(__name__)

DEFAULT_SNAPSHOTS = [0.07, 0.2, 0.7]


def _sample_times(t_max: float, n_samples: int, dt: float) -> np.ndarray:
    """n_samples + 1 tiempos en [0, t_max], redondeados a múltiplos de dt"""
    total_steps = int(round(t_max / dt))
    steps = np.unique(np.round(np.linspace(0, total_steps, n_samples + 1)).astype(int))
    return steps * dt


def write_oracle(
    mu: float,
    snapshots: List[float],
    t_max: Optional[float],
    n_samples: int,
    dx: Optional[float],
    dt: Optional[float],
    half_width: Optional[float],
    well_width: float,
    cap_strength: Optional[float],
    cap_width: Optional[float],
    out: Optional[Path],
) -> List[Path]:
    """
    Escribe la serie de supervivencia del oráculo, un CSV por snapshot y un
    JSON con las distancias a psi_exact (sólo para el pozo delta).
    """
    snapshots = sorted(float(t) for t in snapshots)
    if any(t <= 0 for t in snapshots):
        raise ParameterError("los tiempos de snapshot deben ser > 0")
    overrides = {"well_width": well_width}
    for key, value in (
        ("h", dx),
        ("dt", dt),
        ("half_width", half_width),
        ("cap_strength", cap_strength),
        ("cap_width", cap_width),
    ):
        if value is not None:
            overrides[key] = value
    config = default_config(mu, **overrides)
    horizon = t_max if t_max is not None else max(snapshots, default=1.0)
    times = _sample_times(horizon, n_samples, config.dt)
    result = quench_experiment(config, times, snapshot_times=snapshots)

    directory = output_dir(out)
    stem = f"oracle_mu{number_tag(mu)}"
    frame = survival_frame(result.series)
    if well_width == 0:
        frame["P_exact"] = survival_probability(result.series.times, mu)
    outputs = [write_csv(frame, directory / f"{stem}_survival.csv")]

    comparisons = {}
    for t in snapshots:
        snapshot = result.snapshot_at(t)
        outputs.append(write_csv(field_frame(snapshot), directory / f"{stem}_psi_t{number_tag(t)}.csv"))
        if well_width == 0:
            comparison = compare_fields(snapshot, sample_field(psi_exact, config.grid, t, mu))
            comparisons[f"{t:g}"] = comparison.model_dump()
            logger.info(f"oracle: t={t:g} l2_rel={comparison.l2_rel:.3e}")

    summary = {
        "config": config.model_dump(),
        "initial_energy": result.initial_energy,
        "final_energy": result.final_energy,
        "snapshots": comparisons,
        "l2_rel_tolerance": settings.ORACLE_L2_REL_TOL,
    }
    if well_width == 0:
        summary["max_abs_P_error"] = float(np.max(np.abs(frame["P"] - frame["P_exact"])))
    outputs.append(write_json(summary, directory / f"{stem}_comparison.json"))

    parameters = manifest_parameters(
        mu=mu,
        snapshots=snapshots,
        t_max=t_max,
        n_samples=n_samples,
        dx=dx,
        dt=dt,
        half_width=half_width,
        well_width=well_width,
        cap_strength=cap_strength,
        cap_width=cap_width,
        out=directory,
    )
    write_manifest("oracle", parameters, outputs, directory / f"{stem}.json")
    return [*outputs, directory / f"{stem}.json"]


def cmd_oracle(
    mu: float = typer.Option(..., "--mu", help="Cociente de intensidades μ = λ/α"),
    snapshots: List[float] = typer.Option(DEFAULT_SNAPSHOTS, "--snapshot", help="Tiempo de snapshot (repetible)"),
    t_max: Optional[float] = typer.Option(None, "--t-max", help="Último tiempo de la serie (default: último snapshot)"),
    n_samples: int = typer.Option(50, "--n-samples", help="Intervalos de la serie de supervivencia"),
    dx: Optional[float] = typer.Option(None, "--dx", help="Paso espacial (default ORACLE_DX)"),
    dt: Optional[float] = typer.Option(None, "--dt", help="Paso temporal (default ORACLE_DT)"),
    half_width: Optional[float] = typer.Option(None, "--half-width", help="Semiancho de la caja (default ORACLE_HALF_WIDTH)"),
    well_width: float = typer.Option(0.0, "--well-width", help="Δx del pozo finito; 0 = delta en un nodo"),
    cap_strength: Optional[float] = typer.Option(None, "--cap-strength"),
    cap_width: Optional[float] = typer.Option(None, "--cap-width"),
    out: Optional[Path] = typer.Option(None, "--out", help="Directorio de salida (default OUTPUT_DIR)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Reservado: el cálculo es determinista"),
) -> None:
    """Propagación Crank-Nicolson del quench y comparación con la forma cerrada"""
    with handle_errors("oracle"):
        paths = write_oracle(
            mu, snapshots, t_max, n_samples, dx, dt, half_width, well_width, cap_strength, cap_width, out
        )
    for path in paths:
        typer.echo(str(path))
