"""
Valores de referencia en precisión arbitraria (mpmath).

Sólo se usa en los tests y en `verify --suite cerf`; la librería numérica
nunca depende de mpmath.
"""
from typing import Iterable, List

import mpmath

REFERENCE_DPS = 50


def erfc_reference(z: complex, dps: int = REFERENCE_DPS) -> complex:
    with mpmath.workdps(dps):
        return complex(mpmath.erfc(mpmath.mpc(z.real, z.imag)))


def erf_reference(z: complex, dps: int = REFERENCE_DPS) -> complex:
    with mpmath.workdps(dps):
        return complex(mpmath.erf(mpmath.mpc(z.real, z.imag)))


def erfcx_reference(z: complex, dps: int = REFERENCE_DPS) -> complex:
    with mpmath.workdps(dps):
        w = mpmath.mpc(z.real, z.imag)
        return complex(mpmath.exp(w * w) * mpmath.erfc(w))


def erfcx_tail_reference(z: complex, dps: int = REFERENCE_DPS) -> complex:
    with mpmath.workdps(dps):
        w = mpmath.mpc(z.real, z.imag)
        return complex(1 / mpmath.sqrt(mpmath.pi) - w * mpmath.exp(w * w) * mpmath.erfc(w))


def reference_grid(half_width: float = 10.0, n: int = 41) -> List[complex]:
    """Grilla n×n de z ∈ [−L, L]² usada para la tabla de referencia"""
    step = 2 * half_width / (n - 1)
    axis = [-half_width + k * step for k in range(n)]
    return [complex(re, im) for re in axis for im in axis]


def erfc_table(points: Iterable[complex], dps: int = REFERENCE_DPS) -> List[complex]:
    return [erfc_reference(z, dps) for z in points]
