"""
Amplitud y probabilidad de supervivencia del estado ligado inicial.

Convención de fase: A(t) = ∫ψ_Bi*(x, t)·ψ(x, t) dx, de modo que A ≡ 1 para
μ = 1. La forma cerrada se evalúa con erfcx y erfcx_tail; no hay productos
e^{it}·erfc que desborden ni restas que cancelen.
"""
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import signal

from app.core.exceptions import FitError, ParameterError
from app.enums.survival_method import SurvivalMethod
from app.schemas.survival import ExponentialFit, PowerLawFit, SurvivalSeries
from app.services.cerf import EIGHTH_TURN, SQRT_PI, erfc_scaled, erfcx_tail, sqrt_it
from app.services.exact import psi_exact, truncation_half_width
from app.utils.arrays import as_output
from app.utils.quadrature import quad_complex
from app.utils.regime import (
    enforce,
    require_mu,
    require_non_negative_time,
    require_positive_time,
    survival_longtime_domain,
    survival_shorttime_domain,
)

logger = logging.getLogger(__name__)

MIN_FIT_TIME = 1e-5
MIN_FIT_SAMPLES = 8
OVERLAP_EPSABS = 1e-7
ESCAPE_COEFFICIENT = 8.0 / 3.0 * math.sqrt(2.0 / math.pi)


def _closed_form(t: np.ndarray, mu: float) -> np.ndarray:
    s = np.asarray(sqrt_it(t))
    back = np.exp(-1j * t)
    dispersive = (1.0 + mu**2) * np.asarray(erfc_scaled(s)) + 2.0 * (1.0 - mu**2) * s * np.asarray(erfcx_tail(s))
    if mu > 0:
        dispersive = dispersive - 2.0 * mu * np.asarray(erfc_scaled(mu * s))
    bound = 4.0 * mu * np.exp(1j * t * (mu**2 - 1.0))
    return (back * dispersive + bound) / (1.0 + mu) ** 2


def survival_amplitude(t, mu: float):
    """
    A(t) exacta para el quench 1 → μ.

    A(0) = 1 y A(t, μ=1) = 1 se devuelven exactos.
    """
    mu = require_mu(mu, "survival_amplitude")
    t_arr = require_non_negative_time(t, "survival_amplitude")
    values = np.ones(t_arr.shape, dtype=np.complex128)
    if mu != 1.0:
        positive = t_arr > 0
        if np.any(positive):
            values[positive] = _closed_form(t_arr[positive], mu)
    return as_output(values, t)


def survival_amplitude_mu0(t):
    """A(t) para μ = 0: e^{−it}·[erfcx(√(it)) + 2√(it)·erfcx_tail(√(it))]"""
    t_arr = require_non_negative_time(t, "survival_amplitude_mu0")
    values = np.ones(t_arr.shape, dtype=np.complex128)
    positive = t_arr > 0
    if np.any(positive):
        tp = t_arr[positive]
        s = np.asarray(sqrt_it(tp))
        values[positive] = np.exp(-1j * tp) * (
            np.asarray(erfc_scaled(s)) + 2.0 * s * np.asarray(erfcx_tail(s))
        )
    return as_output(values, t)


def clamp_probability(amplitudes) -> np.ndarray:
    """|A|² acotado a 1; se avisa si el exceso supera el redondeo esperado"""
    raw = np.abs(np.asarray(amplitudes)) ** 2
    excess = np.nanmax(raw, initial=0.0) - 1.0
    if excess > 1e-9:
        logger.warning(f"|A|^2 excede 1 en {excess:.2e}; se recorta a 1")
    return np.minimum(raw, 1.0)


def survival_probability(t, mu: float):
    """P(t) = |A(t)|², recortada a [0, 1]"""
    probabilities = clamp_probability(survival_amplitude(t, mu))
    return as_output(probabilities, t)


def survival_probability_limit(mu: float) -> float:
    """P(∞) = 16μ²/(μ+1)⁴"""
    mu = require_mu(mu, "survival_probability_limit")
    return 16.0 * mu**2 / (mu + 1.0) ** 4


def escape_probability(t, mu: float):
    """1 − P(t) calculado como 2·Re(1 − A) − |1 − A|²"""
    deficit = 1.0 - np.asarray(survival_amplitude(t, mu))
    values = 2.0 * deficit.real - np.abs(deficit) ** 2
    return as_output(values, t)


def survival_amplitude_longtime(t, mu: float, strict: bool = True):
    """
    A(t ≫ 1) ≈ 4μ·e^{it(μ²−1)}/(1+μ)² · [1 + (μ − μ⁻¹)²/(4μ√π·t^{3/2})·e^{−itμ² − i3π/4}]
    """
    mu = require_mu(mu, "survival_amplitude_longtime", positive=True)
    t_arr = require_positive_time(t, "survival_amplitude_longtime")
    correction = (mu - 1.0 / mu) ** 2 / (4.0 * mu * SQRT_PI * t_arr**1.5) * np.exp(
        -1j * (t_arr * mu**2 + 0.75 * math.pi)
    )
    values = 4.0 * mu * np.exp(1j * t_arr * (mu**2 - 1.0)) / (1.0 + mu) ** 2 * (1.0 + correction)
    values = enforce(survival_longtime_domain(t_arr), values, "survival_amplitude_longtime", "t > 10", strict)
    return as_output(values, t)


def survival_probability_longtime(t, mu: float, strict: bool = True):
    """P(t ≫ 1) ≈ (4μ)²/(1+μ)⁴ · [1 + (μ − μ⁻¹)²/(2μ√π·t^{3/2})·cos(tμ² + 3π/4)]"""
    mu = require_mu(mu, "survival_probability_longtime", positive=True)
    t_arr = require_positive_time(t, "survival_probability_longtime")
    oscillation = (mu - 1.0 / mu) ** 2 / (2.0 * mu * SQRT_PI * t_arr**1.5) * np.cos(t_arr * mu**2 + 0.75 * math.pi)
    values = survival_probability_limit(mu) * (1.0 + oscillation)
    values = enforce(survival_longtime_domain(t_arr), values, "survival_probability_longtime", "t > 10", strict)
    return as_output(values, t)


def survival_amplitude_shorttime(t, mu: float, order: int = 5, strict: bool = True):
    """
    Serie en potencias fraccionarias de A(t ≪ 1).

    `order` es el doble de la mayor potencia incluida: order=2 corta en t,
    order=3 en t^{3/2}, ..., order=5 en t^{5/2}.
    """
    mu = require_mu(mu, "survival_amplitude_shorttime")
    if order not in range(1, 6):
        raise ParameterError(f"order debe estar entre 1 y 5, se recibió {order}")
    t_arr = require_non_negative_time(t, "survival_amplitude_shorttime")
    d = mu - 1.0
    terms = {
        2: 2j * d * t_arr,
        3: 8.0 * EIGHTH_TURN**3 * d**2 * t_arr**1.5 / (3.0 * SQRT_PI),
        4: -(d**2) * mu * t_arr**2,
        5: -8.0 * EIGHTH_TURN * d**2 * (2.0 * mu**2 - 1.0) * t_arr**2.5 / (15.0 * SQRT_PI),
    }
    values = np.ones(t_arr.shape, dtype=np.complex128)
    for power, term in terms.items():
        if power <= order:
            values = values + term
    values = enforce(survival_shorttime_domain(t_arr), values, "survival_amplitude_shorttime", "t < 0.1", strict)
    return as_output(values, t)


def escape_probability_shorttime(t, mu: float, strict: bool = True):
    """1 − P(t ≪ 1) ≈ (8/3)·√(2/π)·(μ−1)²·t^{3/2}"""
    mu = require_mu(mu, "escape_probability_shorttime")
    t_arr = require_non_negative_time(t, "escape_probability_shorttime")
    values = ESCAPE_COEFFICIENT * (mu - 1.0) ** 2 * t_arr**1.5
    values = enforce(survival_shorttime_domain(t_arr), values, "escape_probability_shorttime", "t < 0.1", strict)
    return as_output(values, t)


def survival_overlap_numeric(t: float, mu: float, epsabs: float = OVERLAP_EPSABS) -> complex:
    """
    A(t) por cuadratura directa de ∫ψ_Bi*(x, t)·ψ(x, t) dx.

    El integrando es par en x, así que se integra 2·∫₀^L.
    """
    require_positive_time(t, "survival_overlap_numeric")
    mu = require_mu(mu, "survival_overlap_numeric")
    back = complex(math.cos(t), -math.sin(t))

    def integrand(x: float) -> complex:
        return math.exp(-x) * back * psi_exact(x, t, mu)

    half = quad_complex(integrand, 0.0, truncation_half_width(0.0, t), epsabs=epsabs / 2)
    return 2.0 * half


def survival_series(times: Sequence[float], mu: float, method: SurvivalMethod = SurvivalMethod.EXACT) -> SurvivalSeries:
    """
    Serie A(t), P(t) con el método pedido.

    Las formas asintóticas devuelven NaN fuera de su dominio (con warning).
    El método `oracle` se construye en services.oracle.quench_experiment.
    """
    times = np.asarray(times, dtype=float)
    if method == SurvivalMethod.EXACT:
        amplitudes = survival_amplitude(times, mu)
    elif method == SurvivalMethod.QUADRATURE:
        amplitudes = np.array([survival_overlap_numeric(t, mu) if t > 0 else 1.0 + 0j for t in times])
    elif method == SurvivalMethod.SHORT_TIME:
        amplitudes = survival_amplitude_shorttime(times, mu, strict=False)
    elif method == SurvivalMethod.LONG_TIME:
        amplitudes = np.full(times.shape, np.nan, dtype=np.complex128)
        positive = times > 0
        amplitudes[positive] = survival_amplitude_longtime(times[positive], mu, strict=False)
        if not np.all(positive):
            logger.warning("survival_amplitude_longtime: t = 0 fuera de dominio (t > 10), se devuelve nulo")
    else:
        raise ParameterError(f"survival_series no soporta el método {method}")
    return SurvivalSeries.from_amplitudes(times, amplitudes, mu, method)


def _window_samples(times, values, window: Tuple[float, float]):
    t_lo, t_hi = window
    if not t_lo < t_hi:
        raise FitError(f"ventana inválida {window}")
    if t_lo < MIN_FIT_TIME:
        raise FitError(f"la ventana no puede empezar antes de t = {MIN_FIT_TIME:g}")
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    # solo cuentan las muestras estrictamente dentro de la ventana
    inside = (times > t_lo) & (times < t_hi) & np.isfinite(values)
    if np.count_nonzero(inside) < MIN_FIT_SAMPLES:
        raise FitError(
            f"se necesitan al menos {MIN_FIT_SAMPLES} muestras dentro de {window}, hay {np.count_nonzero(inside)}"
        )
    t_in, y_in = times[inside], values[inside]
    if np.any(y_in <= 0):
        raise FitError("el ajuste log-log requiere ordenadas positivas")
    return t_in, y_in


def fit_power_law(
    times, values, window: Tuple[float, float], exponent: Optional[float] = None
) -> PowerLawFit:
    """
    Ajuste lineal por mínimos cuadrados de log y vs log t.

    Args:
        times, values: muestras (t, y) con y > 0 dentro de la ventana
        window: (t_lo, t_hi), con t_lo >= 1e-5
        exponent: si se da, la pendiente queda fija y sólo se ajusta el coeficiente

    Raises:
        FitError: menos de 8 muestras estrictamente dentro de la ventana u
            ordenadas no positivas
    """
    t_in, y_in = _window_samples(times, values, window)
    log_t, log_y = np.log(t_in), np.log(y_in)
    if exponent is None:
        slope, intercept = np.polyfit(log_t, log_y, 1)
    else:
        slope = float(exponent)
        intercept = float(np.mean(log_y - slope * log_t))
    residual = log_y - (intercept + slope * log_t)
    return PowerLawFit(
        exponent=float(slope),
        coefficient=float(np.exp(intercept)),
        rms_log_residual=float(np.sqrt(np.mean(residual**2))),
        window=(float(window[0]), float(window[1])),
        n_samples=int(t_in.size),
        pinned_exponent=exponent is not None,
    )


def fit_exponential_decay(times, values, window: Tuple[float, float]) -> ExponentialFit:
    """Ajuste lineal de log y vs t (modelo de decaimiento exponencial simple)"""
    t_in, y_in = _window_samples(times, values, window)
    log_y = np.log(y_in)
    slope, intercept = np.polyfit(t_in, log_y, 1)
    residual = log_y - (intercept + slope * t_in)
    return ExponentialFit(
        rate=float(-slope),
        amplitude=float(np.exp(intercept)),
        rms_log_residual=float(np.sqrt(np.mean(residual**2))),
        window=(float(window[0]), float(window[1])),
        n_samples=int(t_in.size),
    )


def probability_envelope(
    times, probabilities, mu: float, signed: bool = False
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Máximos locales de |P − P(∞)| (o de P − P(∞) con signed=True).

    Returns:
        (tiempos de los picos, valores de |P − P(∞)| en los picos)
    """
    times = np.asarray(times, dtype=float)
    deviation = np.asarray(probabilities, dtype=float) - survival_probability_limit(mu)
    target = deviation if signed else np.abs(deviation)
    peaks, _ = signal.find_peaks(np.nan_to_num(target, nan=-np.inf))
    return times[peaks], np.abs(deviation[peaks])


def oscillation_envelope(series: SurvivalSeries, signed: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    return probability_envelope(series.times, series.probabilities, series.mu, signed)


def oscillation_frequency(series: SurvivalSeries) -> float:
    """Frecuencia angular 2π/⟨Δt⟩ entre máximos sucesivos de P − P(∞)"""
    peak_times, _ = oscillation_envelope(series, signed=True)
    if peak_times.size < 2:
        raise FitError("se necesitan al menos dos máximos para medir la frecuencia")
    return float(2.0 * math.pi / np.mean(np.diff(peak_times)))


def period_average_probability(mu: float, t_start: float, n_samples: int = 2000) -> float:
    """Promedio de P(t) sobre un período 2π/μ² a partir de t_start (regla del punto medio)"""
    mu = require_mu(mu, "period_average_probability", positive=True)
    period = 2.0 * math.pi / mu**2
    times = t_start + period * (np.arange(n_samples) + 0.5) / n_samples
    return float(np.mean(survival_probability(times, mu)))


def compare_decay_models(
    series: SurvivalSeries, window: Tuple[float, float]
) -> Tuple[PowerLawFit, ExponentialFit]:
    """Ajusta ley de potencias y exponencial a la envolvente de |P − P(∞)| en la misma ventana"""
    peak_times, peak_values = oscillation_envelope(series)
    return (
        fit_power_law(peak_times, peak_values, window),
        fit_exponential_decay(peak_times, peak_values, window),
    )
