"""
Funciones de error de argumento complejo.

Todo pasa por scipy.special (Faddeeva); acá sólo se fija la rama de √(it)
y se arman las combinaciones exp·erfc que no desbordan ni cancelan.
"""
import math

import numpy as np
from scipy import special

from app.core.exceptions import ParameterError
from app.utils.arrays import as_output

SQRT_PI = math.sqrt(math.pi)
EIGHTH_TURN = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))  # e^{iπ/4}

# Desde |z|² >= 50 la serie asintótica de erfcx_tail converge a precisión de máquina
_TAIL_SERIES_MIN_ABS2 = 50.0
_TAIL_SERIES_TERMS = 24


def _as_complex(z) -> np.ndarray:
    return np.asarray(z, dtype=np.complex128)


def sqrt_it(t):
    """
    √(it) en la rama principal: e^{iπ/4}·√t.

    Nunca se calcula como raíz compleja genérica de i·t, así la rama queda fija.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ParameterError(f"sqrt_it requiere t >= 0, se recibió {t}")
    return as_output(EIGHTH_TURN * np.sqrt(t_arr), t)


def erfc_complex(z):
    """Función de error complementaria, continuación analítica a z complejo"""
    return as_output(special.erfc(_as_complex(z)), z)


def erf_complex(z):
    return as_output(special.erf(_as_complex(z)), z)


def erfc_scaled(z):
    """erfcx(z) = e^{z²}·erfc(z) (función de Faddeeva rotada)"""
    return as_output(special.erfcx(_as_complex(z)), z)


def _tail_series(z: np.ndarray) -> np.ndarray:
    # 1/√π · Σ_{n>=1} (-1)^{n+1} (2n-1)!! / (2z²)^n
    inv = 1.0 / (2.0 * z * z)
    term = inv.copy()
    total = term.copy()
    for n in range(2, _TAIL_SERIES_TERMS + 1):
        term = -term * (2 * n - 1) * inv
        total += term
    return total / SQRT_PI


def erfcx_tail(z):
    """
    1/√π − z·erfcx(z) sin cancelación.

    Para |z| grande en el semiplano derecho ambos términos valen ~1/√π y su
    diferencia ~1/(2√π z²); ahí se usa la serie asintótica.
    """
    z_arr = _as_complex(z)
    use_series = (np.abs(z_arr) ** 2 >= _TAIL_SERIES_MIN_ABS2) & (z_arr.real >= 0)
    direct = 1.0 / SQRT_PI - z_arr * special.erfcx(z_arr)
    if np.any(use_series):
        safe = np.where(use_series, z_arr, 1.0)
        direct = np.where(use_series, _tail_series(safe), direct)
    return as_output(direct, z)


def exp_erfc(z, exponent, scaled_exponent):
    """
    e^{exponent}·erfc(z) evaluado de forma estable.

    Args:
        z: argumento del erfc
        exponent: exponente E del prefactor, con Re(E) <= 0
        scaled_exponent: E − z² calculado analíticamente por el llamador

    Returns:
        e^{E−z²}·erfcx(z) si Re(z) >= 0, y 2e^{E} − e^{E−z²}·erfcx(−z) si no.
    """
    z_arr, e_arr, s_arr = np.broadcast_arrays(
        _as_complex(z), _as_complex(exponent), _as_complex(scaled_exponent)
    )
    right = z_arr.real >= 0
    scaled = np.exp(s_arr) * special.erfcx(np.where(right, z_arr, -z_arr))
    out = np.where(right, scaled, 2.0 * np.exp(e_arr) - scaled)
    return as_output(out, out)
