"""
Guardas de dominio para las aproximaciones asintóticas.

Los umbrales son decisiones de ingeniería: x² > 25t para el campo lejano y
el régimen de tiempos cortos, t > 10·max(1, |x|) para tiempos largos.
"""
import logging

import numpy as np

from app.core.exceptions import ParameterError, RegimeError

logger = logging.getLogger(__name__)

FARFIELD_RATIO = 25.0
LONGTIME_FACTOR = 10.0
SURVIVAL_LONGTIME_MIN = 10.0
SURVIVAL_SHORTTIME_MAX = 0.1


def require_mu(mu: float, operation: str, positive: bool = False) -> float:
    if not np.isfinite(mu) or mu < 0 or (positive and mu == 0):
        bound = "mu > 0" if positive else "mu >= 0"
        raise ParameterError(f"{operation}: se requiere {bound}, se recibió mu={mu}")
    return float(mu)


def require_positive_time(t, operation: str) -> np.ndarray:
    t_arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t_arr)) or np.any(t_arr <= 0):
        raise ParameterError(f"{operation}: se requiere t > 0, se recibió t={t}")
    return t_arr


def require_non_negative_time(t, operation: str) -> np.ndarray:
    t_arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t_arr)) or np.any(t_arr < 0):
        raise ParameterError(f"{operation}: se requiere t >= 0, se recibió t={t}")
    return t_arr


def farfield_domain(x, t) -> np.ndarray:
    """x² > 25·t (también es el dominio de la forma de tiempos cortos)"""
    return np.asarray(x, dtype=float) ** 2 > FARFIELD_RATIO * np.asarray(t, dtype=float)


def longtime_domain(x, t) -> np.ndarray:
    x_abs = np.abs(np.asarray(x, dtype=float))
    return np.asarray(t, dtype=float) > LONGTIME_FACTOR * np.maximum(1.0, x_abs)


def survival_longtime_domain(t) -> np.ndarray:
    return np.asarray(t, dtype=float) > SURVIVAL_LONGTIME_MIN


def survival_shorttime_domain(t) -> np.ndarray:
    return np.asarray(t, dtype=float) < SURVIVAL_SHORTTIME_MAX


def enforce(mask: np.ndarray, values: np.ndarray, operation: str, condition: str, strict: bool):
    """
    Aplica la guarda sobre un resultado ya evaluado.

    Con strict=True cualquier muestra fuera de dominio levanta RegimeError;
    con strict=False esas muestras se vuelven NaN y se deja un warning.
    """
    mask = np.broadcast_to(mask, np.shape(values))
    if np.all(mask):
        return values
    if strict:
        raise RegimeError(operation, condition)
    n_bad = int(np.size(mask) - np.count_nonzero(mask))
    logger.warning(f"{operation}: {n_bad} muestras fuera de dominio ({condition}), se devuelven nulas")
    out = np.array(values, copy=True)
    out[~mask] = np.nan
    return out
