"""Cuadratura adaptativa de integrandos complejos sobre scipy.integrate.quad"""
import logging
from typing import Callable, Iterable, Optional

import numpy as np
from scipy import integrate

from app.core.config import settings
from app.core.exceptions import QuadratureError

logger = logging.getLogger(__name__)


def _split_points(lo: float, hi: float, points: Optional[Iterable[float]]) -> list:
    inner = sorted({float(p) for p in (points or ()) if lo < p < hi})
    return [lo, *inner, hi]


def quad_complex(
    func: Callable[[float], complex],
    lo: float,
    hi: float,
    points: Optional[Iterable[float]] = None,
    epsabs: Optional[float] = None,
    limit: Optional[int] = None,
) -> complex:
    """
    ∫ func(x) dx sobre [lo, hi] para un integrando complejo.

    El intervalo se corta en `points` (kinks, puntos estacionarios) y cada
    tramo se integra por separado en parte real e imaginaria.

    Raises:
        QuadratureError: si la estimación de error total supera epsabs
    """
    epsabs = settings.QUAD_EPSABS if epsabs is None else epsabs
    limit = settings.QUAD_LIMIT if limit is None else limit
    edges = _split_points(lo, hi, points)
    n_pieces = len(edges) - 1

    total = 0j
    total_error = 0.0
    messages = []
    for a, b in zip(edges[:-1], edges[1:]):
        for part, unit in ((np.real, 1.0), (np.imag, 1j)):
            value, error, info, *rest = integrate.quad(
                lambda x: float(part(func(x))),
                a,
                b,
                epsabs=epsabs / (2 * n_pieces),
                epsrel=0.0,
                limit=limit,
                full_output=1,
            )
            total += unit * value
            total_error += error
            if rest:
                messages.append(rest[0])

    if messages and total_error > epsabs:
        detail = messages[0].strip().splitlines()[0]
        raise QuadratureError(f"quad_complex on [{lo:g}, {hi:g}]: {detail}", total_error)
    if messages:
        logger.debug(f"quad_complex: {len(messages)} avisos de quad, error total {total_error:.2e}")
    return total
