"""
Oráculo numérico: propagación Crank-Nicolson de i∂ψ/∂t = −∂²ψ/∂x² + Vψ.

El pozo delta se representa con un solo nodo de profundidad −2μ/h (integral
−2μ); el pozo finito de ancho Δx con profundidad −2μ/Δx. Es independiente de
las formas cerradas y sirve para arbitrar sus afirmaciones.
"""
import logging
import math
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy import integrate, linalg, optimize, sparse
from scipy.sparse.linalg import splu

from app.core.config import settings
from app.core.exceptions import GridMismatchError, ParameterError, SolverError
from app.enums.survival_method import SurvivalMethod
from app.schemas.field import ComplexField, GridSpec
from app.schemas.oracle import (
    BoundProjection,
    FieldComparison,
    FiniteWidthReport,
    MatchedDeltaParams,
    OracleConfig,
    QuenchResult,
)
from app.schemas.survival import SurvivalSeries
from app.services.bound_states import psi_bound_final, psi_initial
from app.services.survival import survival_probability

logger = logging.getLogger(__name__)

STIFFNESS_WARNING = 0.5
EDGE_TOLERANCE = 1e-9


def default_config(mu: float, **overrides) -> OracleConfig:
    """Configuración de escritorio: h = 0.005, dt = 5e-5, caja [−60, 60]"""
    grid = GridSpec.symmetric(
        overrides.pop("half_width", settings.ORACLE_HALF_WIDTH), overrides.pop("h", settings.ORACLE_DX)
    )
    values = {
        "grid": grid,
        "dt": settings.ORACLE_DT,
        "mu": mu,
        "cap_strength": settings.CAP_STRENGTH,
        "cap_width": settings.CAP_WIDTH,
    }
    values.update(overrides)
    return OracleConfig(**values)


def build_potential(config: OracleConfig) -> np.ndarray:
    """
    Potencial complejo sobre la grilla.

    Parte real: el pozo (delta en un nodo o pozo cuadrado). Parte imaginaria:
    capa absorbente −i·W(x) con rampa cuadrática en los cap_width exteriores.
    """
    grid = config.grid
    x = grid.points()
    h = grid.h
    potential = np.zeros(grid.n_points, dtype=np.complex128)

    if config.mu > 0:
        if config.well_width == 0:
            potential[int(np.argmin(np.abs(x)))] = -2.0 * config.mu / h
        else:
            depth = -2.0 * config.mu / config.well_width
            half = 0.5 * config.well_width
            inside = np.abs(x) < half - EDGE_TOLERANCE * h
            edge = np.abs(np.abs(x) - half) <= EDGE_TOLERANCE * h
            potential[inside] = depth
            # un nodo justo en el borde lleva media profundidad: Σ V·h = −2μ
            potential[edge] = 0.5 * depth

    if config.cap_strength > 0 and config.cap_width > 0:
        depth_into_layer = np.maximum(
            x - (grid.x_max - config.cap_width), (grid.x_min + config.cap_width) - x
        )
        ramp = np.clip(depth_into_layer / config.cap_width, 0.0, 1.0)
        potential = potential - 1j * config.cap_strength * ramp**2

    return potential


def hamiltonian(grid: GridSpec, potential: np.ndarray) -> sparse.csc_matrix:
    """−D₂ + diag(V) con condiciones de Dirichlet en los bordes de la caja"""
    h2 = grid.h**2
    n = grid.n_points
    off = np.full(n - 1, -1.0 / h2)
    main = 2.0 / h2 + np.asarray(potential, dtype=np.complex128)
    return sparse.diags([off, main, off], [-1, 0, 1], format="csc", dtype=np.complex128)


def ground_state(potential: np.ndarray, grid: GridSpec) -> ComplexField:
    """
    Autovector más bajo de −D₂ + diag(Re V), normalizado en L².

    Raises:
        SolverError: si el potencial no tiene estado ligado
    """
    real_potential = np.asarray(potential).real
    if real_potential.min() >= 0:
        raise SolverError("no bound state: el potencial no es atractivo")
    h2 = grid.h**2
    main = 2.0 / h2 + real_potential
    off = np.full(grid.n_points - 1, -1.0 / h2)
    try:
        energies, vectors = linalg.eigh_tridiagonal(main, off, select="i", select_range=(0, 0))
    except (linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"eigh_tridiagonal falló: {exc}") from exc

    energy = float(energies[0])
    if energy >= 0:
        raise SolverError(f"no bound state: el autovalor más bajo es {energy:.3e} >= 0")
    vector = vectors[:, 0]
    vector = vector * np.sign(vector[np.argmax(np.abs(vector))])

    residual = main * vector
    residual[1:] += off * vector[:-1]
    residual[:-1] += off * vector[1:]
    residual -= energy * vector
    operator_scale = 4.0 / h2 + float(np.max(np.abs(real_potential)))
    if np.linalg.norm(residual) > 1e-10 * operator_scale * np.linalg.norm(vector):
        raise SolverError(f"residuo del autovector demasiado grande: {np.linalg.norm(residual):.2e}")

    x = grid.points()
    vector = vector / math.sqrt(integrate.trapezoid(vector**2, x))
    return ComplexField(grid=grid, values=vector, time=0.0, mu=0.0, energy=energy)


class CrankNicolsonPropagator:
    """
    Paso (I + i·dt/2·H)ψ_{n+1} = (I − i·dt/2·H)ψ_n con la matriz izquierda
    factorizada una sola vez (splu).
    """

    def __init__(self, grid: GridSpec, potential: np.ndarray, dt: float):
        if dt <= 0:
            raise ParameterError(f"dt debe ser positivo, se recibió {dt}")
        self.grid = grid
        self.dt = dt
        stiffness = dt * float(np.max(np.abs(potential)))
        if stiffness > STIFFNESS_WARNING:
            logger.warning(f"dt·max|V| = {stiffness:.2f} > {STIFFNESS_WARNING}: paso rígido para el pozo")
        h_matrix = hamiltonian(grid, potential)
        identity = sparse.identity(grid.n_points, dtype=np.complex128, format="csc")
        try:
            self._lhs = splu((identity + 0.5j * dt * h_matrix).tocsc())
        except RuntimeError as exc:
            raise SolverError(f"no se pudo factorizar la matriz de Crank-Nicolson: {exc}") from exc
        self._rhs = (identity - 0.5j * dt * h_matrix).tocsr()

    def step(self, values: np.ndarray, n_steps: int = 1) -> np.ndarray:
        for _ in range(n_steps):
            values = self._lhs.solve(self._rhs @ values)
        if not np.all(np.isfinite(values)):
            raise SolverError("la propagación produjo valores no finitos")
        return values


def propagate_cn(psi: ComplexField, potential: np.ndarray, dt: float, n_steps: int) -> ComplexField:
    """Aplica n_steps pasos de Crank-Nicolson a psi"""
    if n_steps < 0:
        raise ParameterError(f"n_steps debe ser >= 0, se recibió {n_steps}")
    propagator = CrankNicolsonPropagator(psi.grid, potential, dt)
    values = propagator.step(psi.values.copy(), n_steps)
    return ComplexField(grid=psi.grid, values=values, time=psi.time + n_steps * dt, mu=psi.mu)


def compare_fields(a: ComplexField, b: ComplexField) -> FieldComparison:
    """
    Distancias entre a y b (b es la referencia para l2_rel) y el solapamiento ⟨a|b⟩.

    Raises:
        GridMismatchError: si las grillas no coinciden
    """
    if a.grid != b.grid:
        raise GridMismatchError(f"grillas distintas: {a.grid} vs {b.grid}")
    x = a.x
    diff = a.values - b.values
    l2_abs = math.sqrt(integrate.trapezoid(np.abs(diff) ** 2, x))
    reference = math.sqrt(integrate.trapezoid(np.abs(b.values) ** 2, x))
    overlap = integrate.trapezoid(np.conj(a.values) * b.values, x)
    return FieldComparison(
        l2_abs=l2_abs,
        l2_rel=l2_abs / reference if reference > 0 else math.inf,
        linf=float(np.max(np.abs(diff))),
        overlap_re=float(overlap.real),
        overlap_im=float(overlap.imag),
    )


def bound_projection(psi: ComplexField, mu: float) -> BoundProjection:
    """⟨ψ_Bf(·, 0)|ψ(·, t)⟩ con ψ_Bf normalizado (√μ·e^{−μ|x|})"""
    x = psi.x
    overlap = integrate.trapezoid(np.conj(psi_bound_final(x, 0.0, mu)) * psi.values, x)
    return BoundProjection(time=psi.time, mu=mu, overlap_re=float(overlap.real), overlap_im=float(overlap.imag))


def initial_state(config: OracleConfig) -> ComplexField:
    """
    ψ_Bi muestreado analíticamente (delta) o autoestado del pozo finito con μ = 1.

    La muestra de e^{−|x|} se renormaliza sobre la grilla: su norma por
    trapecios es 1 + h²/12.
    """
    grid = config.grid
    if config.well_width == 0:
        x = grid.points()
        values = psi_initial(x, 0.0)
        values = values / math.sqrt(integrate.trapezoid(np.abs(values) ** 2, x))
        return ComplexField(grid=grid, values=values, time=0.0, mu=1.0, energy=-1.0)
    initial_config = config.with_mu(1.0, absorbing=False)
    return ground_state(build_potential(initial_config), grid)


def _steps_for(t: float, dt: float) -> int:
    n = int(round(t / dt))
    if abs(n * dt - t) > 1e-9 * max(1.0, t):
        logger.warning(f"t={t} no es múltiplo de dt={dt}; se propaga hasta {n * dt}")
    return n


def quench_experiment(
    config: OracleConfig,
    t_samples: Sequence[float],
    snapshot_times: Optional[Iterable[float]] = None,
) -> QuenchResult:
    """
    Protocolo completo: prepara ψ_Bi, cambia la intensidad a μ en t = 0 y
    registra A(t) = e^{iE_i t}·⟨ψ_i|ψ(t)⟩ en cada muestra.

    Args:
        config: grilla, dt, μ, ancho del pozo y capa absorbente
        t_samples: tiempos de muestreo de A(t) (>= 0)
        snapshot_times: tiempos en los que se guarda ψ completo

    Returns:
        QuenchResult con la serie (método oracle) y los snapshots pedidos
    """
    snapshot_times = sorted(float(t) for t in (snapshot_times or ()))
    times = sorted({float(t) for t in t_samples} | set(snapshot_times))
    if times and times[0] < 0:
        raise ParameterError("los tiempos de muestreo deben ser >= 0")

    initial = initial_state(config)
    initial_energy = float(initial.energy)
    potential = build_potential(config)
    propagator = CrankNicolsonPropagator(config.grid, potential, config.dt)
    x = config.grid.points()

    final_energy = None
    if config.mu > 0:
        final_energy = ground_state(build_potential(config.with_mu(config.mu, absorbing=False)), config.grid).energy

    logger.info(
        f"quench_experiment: mu={config.mu}, well_width={config.well_width}, "
        f"{config.grid.n_points} nodos, dt={config.dt}, t_max={times[-1] if times else 0}"
    )
    values = initial.values.copy()
    step_count = 0
    amplitudes = {}
    snapshots: List[ComplexField] = []
    for t in times:
        target = _steps_for(t, config.dt)
        values = propagator.step(values, target - step_count)
        step_count = target
        overlap = integrate.trapezoid(np.conj(initial.values) * values, x)
        amplitudes[t] = complex(np.exp(1j * initial_energy * t) * overlap)
        if t in snapshot_times:
            snapshots.append(ComplexField(grid=config.grid, values=values.copy(), time=t, mu=config.mu))
        logger.debug(f"quench_experiment: t={t}, |A|^2={abs(amplitudes[t]) ** 2:.6f}")

    requested = sorted({float(t) for t in t_samples})
    series = SurvivalSeries.from_amplitudes(
        requested, [amplitudes[t] for t in requested], config.mu, SurvivalMethod.ORACLE
    )
    logger.info(f"quench_experiment: {step_count} pasos completados")
    return QuenchResult(
        config=config,
        series=series,
        snapshots=snapshots,
        initial_energy=initial_energy,
        final_energy=final_energy,
    )


def square_well_bound_energy(depth: float, width: float) -> float:
    """
    Energía del estado par fundamental de un pozo cuadrado −U₀ de ancho Δx
    (2m = 1): k·tan(kΔx/2) = κ con k² + κ² = U₀.
    """
    if depth <= 0 or width <= 0:
        raise ParameterError("square_well_bound_energy requiere profundidad y ancho positivos")
    k_max = min(math.sqrt(depth), math.pi / width * (1.0 - 1e-12))

    def condition(k: float) -> float:
        return k * math.tan(0.5 * k * width) - math.sqrt(max(depth - k * k, 0.0))

    k = optimize.brentq(condition, 0.0, k_max, xtol=1e-14)
    return k * k - depth


def matched_delta_params(well_width: float, mu: float) -> MatchedDeltaParams:
    """
    Modelo delta equivalente al pozo finito usando las energías ligadas medidas:
    μ_eff = κ_f/κ_i y tiempo reescalado κ_i²·t.
    """
    if well_width <= 0:
        raise ParameterError("matched_delta_params requiere well_width > 0")
    kappa_initial = math.sqrt(-square_well_bound_energy(2.0 / well_width, well_width))
    kappa_final = math.sqrt(-square_well_bound_energy(2.0 * mu / well_width, well_width)) if mu > 0 else 0.0
    return MatchedDeltaParams(
        well_width=well_width, mu=mu, kappa_initial=kappa_initial, kappa_final=kappa_final
    )


def _relative_errors(measured: np.ndarray, reference: np.ndarray) -> List[float]:
    with np.errstate(divide="ignore", invalid="ignore"):
        return [float(v) for v in np.abs(measured - reference) / np.abs(reference)]


def finite_width_validity(config: OracleConfig, times: Sequence[float]) -> FiniteWidthReport:
    """
    Compara el pozo finito del oráculo con el modelo delta (regla 2α = U₀Δx y
    modelo con energías medidas) en los tiempos pedidos.
    """
    if config.well_width <= 0:
        raise ParameterError("finite_width_validity requiere well_width > 0")
    matched = matched_delta_params(config.well_width, config.mu)
    result = quench_experiment(config, times)
    t = result.series.times
    p_oracle = result.series.probabilities
    p_strength = np.asarray(survival_probability(t, config.mu))
    p_matched = np.asarray(survival_probability(matched.time_scale * t, matched.mu_effective))
    return FiniteWidthReport(
        well_width=config.well_width,
        mu=config.mu,
        mu_matched=matched.mu_effective,
        time_scale=matched.time_scale,
        times=[float(v) for v in t],
        p_oracle=[float(v) for v in p_oracle],
        p_strength_rule=[float(v) for v in p_strength],
        p_matched=[float(v) for v in p_matched],
        rel_error_p=_relative_errors(p_oracle, p_matched),
        rel_error_escape=_relative_errors(1.0 - p_oracle, 1.0 - p_matched),
        rel_error_p_strength_rule=_relative_errors(p_oracle, p_strength),
        notes={"t_over_width2": ", ".join(f"{v / config.well_width**2:.3g}" for v in t)},
    )
