"""
Función de onda exacta después del quench y sus formas límite.

Todas las combinaciones e^{fase}·erfc(·) se arman con exponentes combinados
analíticamente (ver cerf.exp_erfc), así nada desborda para t grande.
"""
import cmath
import inspect
import logging
import math
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from app.core.config import settings
from app.core.exceptions import ParameterError
from app.schemas.field import ComplexField, GridSpec
from app.services.bound_states import psi_initial
from app.services.cerf import EIGHTH_TURN, SQRT_PI, erfc_scaled, exp_erfc, sqrt_it
from app.utils.arrays import as_output
from app.utils.quadrature import quad_complex
from app.utils.regime import (
    enforce,
    farfield_domain,
    longtime_domain,
    require_mu,
    require_positive_time,
)

logger = logging.getLogger(__name__)

FieldSource = Union[ComplexField, Callable[[float], complex]]


def truncation_half_width(x: float, t: float) -> float:
    """Caja de integración [−L, L] con L = |x| + 40 + 10√t"""
    return abs(x) + settings.BOX_MARGIN + 10.0 * math.sqrt(t)


def kernel_free(x, xp, t):
    """K_free(x, x'; t) = e^{i(x−x')²/4t} / (2√(iπt))"""
    t_arr = require_positive_time(t, "kernel_free")
    dx = np.asarray(x, dtype=float) - np.asarray(xp, dtype=float)
    values = np.exp(1j * dx**2 / (4.0 * t_arr)) / (2.0 * EIGHTH_TURN * np.sqrt(math.pi * t_arr))
    return as_output(values, values)


def kernel(x, xp, t, mu: float):
    """
    Propagador del pozo delta de intensidad μ:

        K = K_free + (μ/2)·e^{−μ(|x|+|x'|−iμt)}·erfc[(|x|+|x'|−2iμt)/(2√(it))]
    """
    mu = require_mu(mu, "kernel")
    free = kernel_free(x, xp, t)
    if mu == 0:
        return free
    t_arr = np.asarray(t, dtype=float)
    r_sum = np.abs(np.asarray(x, dtype=float)) + np.abs(np.asarray(xp, dtype=float))
    s = np.asarray(sqrt_it(t_arr))
    z = r_sum / (2.0 * s) - mu * s
    # E = −μR + iμ²t ; E − z² = iR²/4t
    bound = exp_erfc(z, -mu * r_sum + 1j * mu**2 * t_arr, 1j * r_sum**2 / (4.0 * t_arr))
    values = np.asarray(free) + 0.5 * mu * np.asarray(bound)
    return as_output(values, values)


def wavefunction_terms(r, t):
    """
    Los tres productos exp·erfc de la solución exacta, como función de r = |x|:

        T1 = e^{it−r}·erfc(√(it) − r/2√(it))
        T2 = e^{it+r}·erfc(√(it) + r/2√(it))
        T3(μ) se arma en psi_exact porque depende de μ.

    Devuelve (T1, T2, fase e^{ir²/4t}, √(it)).
    """
    s = np.asarray(sqrt_it(t))
    a = r / (2.0 * s)
    phase = np.exp(1j * r**2 / (4.0 * t))  # = e^{−a²}
    t1 = exp_erfc(s - a, 1j * t - r, 1j * r**2 / (4.0 * t))
    # Re(√(it) + a) > 0 siempre: basta la forma escalada
    t2 = phase * erfc_scaled(s + a)
    return np.asarray(t1), np.asarray(t2), phase, s


def _bound_term(r, t, mu: float, s):
    # T3 = e^{iμ²t−μr}·[1 + erf(μ√(it) − r/2√(it))] = 2e^{E} − e^{E}·erfc(z), con E − z² = ir²/4t
    exponent = 1j * mu**2 * t - mu * r
    z = mu * s - r / (2.0 * s)
    return 2.0 * np.exp(exponent) - np.asarray(exp_erfc(z, exponent, 1j * r**2 / (4.0 * t)))


def psi_exact(x, t, mu: float):
    """
    Solución exacta ψ(x, t) para el estado inicial ψ_Bi y el pozo final μ.

    Args:
        x: posición (escalar o arreglo)
        t: tiempo, t > 0 (para t = 0 usar psi_initial)
        mu: cociente de intensidades μ = λ/α >= 0

    Returns:
        ψ(x, t) con la misma forma que la entrada
    """
    mu = require_mu(mu, "psi_exact")
    t_arr = require_positive_time(t, "psi_exact")
    if mu == 1.0:
        return psi_initial(x, t)

    r = np.abs(np.asarray(x, dtype=float))
    t1, t2, _, s = wavefunction_terms(r, t_arr)
    values = 0.5 * (t1 + (1.0 - mu) / (1.0 + mu) * t2)
    if mu > 0:
        values = values + mu / (1.0 + mu) * _bound_term(r, t_arr, mu, s)
    return as_output(values, values)


def psi_exact_mu0(x, t):
    """Evolución libre (μ = 0): ½·[T1 + T2]"""
    t_arr = require_positive_time(t, "psi_exact_mu0")
    r = np.abs(np.asarray(x, dtype=float))
    t1, t2, _, _ = wavefunction_terms(r, t_arr)
    values = 0.5 * (t1 + t2)
    return as_output(values, values)


def psi_farfield(x, t, mu: float, strict: bool = True):
    """
    Parte dispersiva lejana (x²/t ≫ 1), con k₀ = |x|/2t:

        ψ ≅ e^{ix²/4t}/√(iπt) · (1−μ)k₀ / ((1+k₀²)(k₀ − iμ))

    Para μ = 0 se reduce a e^{ix²/4t}/(√(iπt)·(1 + (x/2t)²)).
    """
    mu = require_mu(mu, "psi_farfield")
    t_arr = require_positive_time(t, "psi_farfield")
    x_arr = np.asarray(x, dtype=float)
    k0 = np.abs(x_arr) / (2.0 * t_arr)
    with np.errstate(divide="ignore", invalid="ignore"):
        shape = (1.0 - mu) * k0 / ((1.0 + k0**2) * (k0 - 1j * mu))
        values = np.exp(1j * x_arr**2 / (4.0 * t_arr)) / (EIGHTH_TURN * np.sqrt(math.pi * t_arr)) * shape
    values = enforce(farfield_domain(x_arr, t_arr), values, "psi_farfield", "x^2 > 25 t", strict)
    return as_output(values, values)


def psi_shorttime(x, t, mu: float, strict: bool = True):
    """
    ψ ≅ e^{it−|x|} − 4(1−μ)·(it)^{3/2}/√π · e^{ix²/4t}/x²   (t ≪ x²)

    La fase de la corrección es x²/4t.
    """
    mu = require_mu(mu, "psi_shorttime")
    t_arr = require_positive_time(t, "psi_shorttime")
    x_arr = np.asarray(x, dtype=float)
    it_three_halves = EIGHTH_TURN**3 * t_arr**1.5
    with np.errstate(divide="ignore", invalid="ignore"):
        correction = (
            4.0 * (1.0 - mu) * it_three_halves / SQRT_PI * np.exp(1j * x_arr**2 / (4.0 * t_arr)) / x_arr**2
        )
    values = np.exp(1j * t_arr - np.abs(x_arr)) - correction
    values = enforce(farfield_domain(x_arr, t_arr), values, "psi_shorttime", "x^2 > 25 t", strict)
    return as_output(values, values)


def psi_longtime(x, t, mu: float, strict: bool = True):
    """
    ψ ≅ (μ⁻¹ − 1)·√(i/π)·|x|·t^{−3/2}·e^{ix²/4t} + 2μ/(1+μ)·e^{iμ²t − μ|x|}

    El coeficiente ligado 2μ/(1+μ) = ⟨ψ_Bf|ψ_Bi⟩·√μ es el límite t → ∞ de la
    solución exacta.
    """
    mu = require_mu(mu, "psi_longtime", positive=True)
    t_arr = require_positive_time(t, "psi_longtime")
    x_arr = np.asarray(x, dtype=float)
    r = np.abs(x_arr)
    dispersive = (1.0 / mu - 1.0) * EIGHTH_TURN / SQRT_PI * r * t_arr**-1.5 * np.exp(1j * x_arr**2 / (4.0 * t_arr))
    bound = 2.0 * mu / (1.0 + mu) * np.exp(1j * mu**2 * t_arr - mu * r)
    values = enforce(
        longtime_domain(x_arr, t_arr), dispersive + bound, "psi_longtime", "t > 10 max(1, |x|)", strict
    )
    return as_output(values, values)


def free_gaussian(x, t, spread: float = 0.25):
    """
    Evolución libre cerrada de ψ₀ = e^{−x²/(4·spread)}:

        ψ(x, t) = √(spread/(spread + it)) · e^{−x²/(4(spread + it))}

    spread = 1/4 corresponde a e^{−x²}.
    """
    x_arr = np.asarray(x, dtype=float)
    width = spread + 1j * np.asarray(t, dtype=float)
    values = np.sqrt(spread / width) * np.exp(-(x_arr**2) / (4.0 * width))
    return as_output(values, values)


def _field_interpolant(field: ComplexField) -> Tuple[Callable[[float], complex], float]:
    """
    Spline cúbico por tramos, cortado en x = 0 para respetar el kink de |x|.

    En un campo ya evolucionado (time > 0) se interpola la envolvente
    ψ·e^{−ix²/4t}: lejos del origen el chirp libre oscila más rápido que la
    grilla y el spline solo tiene que seguir la parte suave.

    Returns:
        (interpolante, cota del error de interpolación). La cota sale de un
        spline sobre las muestras alternas evaluado en las omitidas, dividido
        por 16 (error O(h⁴)).
    """
    x = field.x
    chirp = 1.0 / (4.0 * field.time) if field.time > 0 else 0.0
    envelope = field.values * np.exp(-1j * chirp * x**2)
    pieces = []
    has_origin = field.grid.x_min < 0 < field.grid.x_max and np.any(np.isclose(x, 0.0, atol=1e-12))
    if has_origin:
        zero = int(np.argmin(np.abs(x)))
        segments = [(x[: zero + 1], envelope[: zero + 1]), (x[zero:], envelope[zero:])]
    else:
        segments = [(x, envelope)]

    error = 0.0
    for xs, ys in segments:
        if xs.size < 8:
            raise ParameterError("la grilla es demasiado corta para interpolar el campo")
        pieces.append((xs[0], xs[-1], CubicSpline(xs, ys.real), CubicSpline(xs, ys.imag)))
        coarse_x = xs[::2]
        skipped = xs[1::2] < coarse_x[-1]
        coarse = CubicSpline(coarse_x, ys[::2])
        miss = np.abs(coarse(xs[1::2][skipped]) - ys[1::2][skipped])
        error = max(error, float(np.max(miss)) / 16.0)

    def evaluate(xp: float) -> complex:
        for lo, hi, re_spline, im_spline in pieces:
            if lo <= xp <= hi:
                return complex(re_spline(xp), im_spline(xp)) * cmath.exp(1j * chirp * xp * xp)
        return 0j

    return evaluate, error


def propagate_by_kernel(
    psi0: FieldSource,
    x: float,
    t: float,
    mu: float,
    epsabs: Optional[float] = None,
) -> complex:
    """
    ψ(x, t₀ + t) = ∫ K(x, x'; t)·ψ(x', t₀) dx' por cuadratura adaptativa.

    Args:
        psi0: estado de partida, como ComplexField (interpolado; su `time` es t₀)
            o como función de x'
        x: punto de evaluación
        t: tiempo de propagación (> 0)
        mu: intensidad del pozo final
        epsabs: tolerancia absoluta. Por defecto settings.QUAD_EPSABS; para un
            ComplexField nunca menor que el error de interpolación integrado
            contra |K|

    Raises:
        QuadratureError: si quad no converge, con la estimación de error alcanzada
    """
    require_positive_time(t, "propagate_by_kernel")
    mu = require_mu(mu, "propagate_by_kernel")
    half_width = truncation_half_width(x, t)
    lo, hi = -half_width, half_width
    if isinstance(psi0, ComplexField):
        lo = max(lo, psi0.grid.x_min)
        hi = min(hi, psi0.grid.x_max)
        source, interp_error = _field_interpolant(psi0)
        if epsabs is None:
            kernel_scale = 1.0 / (2.0 * math.sqrt(math.pi * t)) + mu
            epsabs = max(settings.QUAD_EPSABS, interp_error * kernel_scale * (hi - lo))
            logger.debug(f"propagate_by_kernel: error de interpolación {interp_error:.2e}, epsabs {epsabs:.2e}")
    else:
        source = psi0

    def integrand(xp: float) -> complex:
        return kernel(x, xp, t, mu) * source(xp)

    # kink de |x'| en 0 y punto estacionario de la fase libre en x' = x
    return quad_complex(integrand, lo, hi, points=(0.0, x), epsabs=epsabs)


def _accepts(fn: Callable, name: str) -> bool:
    try:
        return name in inspect.signature(fn).parameters
    except (TypeError, ValueError):
        return False


def sample_field(fn: Callable, grid: GridSpec, t: float, mu: float, strict: bool = False) -> ComplexField:
    """
    Evalúa una de las formas de ψ sobre toda la grilla.

    Las formas asintóticas se llaman con strict=False: las muestras fuera de
    su dominio quedan en NaN (con un warning) en lugar de levantar error.
    t = 0 se resuelve siempre con psi_initial.
    """
    x = grid.points()
    if t == 0:
        values = psi_initial(x, 0.0)
    else:
        kwargs = {}
        if _accepts(fn, "mu"):
            kwargs["mu"] = mu
        if _accepts(fn, "strict"):
            kwargs["strict"] = strict
        values = fn(x, t, **kwargs)
    return ComplexField(grid=grid, values=values, time=t, mu=mu)


def field_norm(field: ComplexField) -> float:
    """Norma L² por trapecios (las muestras NaN se ignoran)"""
    density = np.nan_to_num(field.abs2(), nan=0.0)
    return float(math.sqrt(integrate.trapezoid(density, field.x)))
