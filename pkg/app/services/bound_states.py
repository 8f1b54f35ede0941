"""
Estados ligados del pozo delta antes y después del quench.

Unidades adimensionales (ħ = 1, 2m = 1, x → αx, t → α²t): el pozo inicial
tiene energía −1 y el final, de intensidad μ, energía −μ².
"""
import math

import numpy as np

from app.utils.arrays import as_output
from app.utils.regime import require_mu


def psi_initial(x, t=0.0):
    """ψ_Bi(x, t) = e^{−|x| + it}, normalizado en L²"""
    x_arr = np.asarray(x, dtype=float)
    values = np.exp(-np.abs(x_arr) + 1j * np.asarray(t, dtype=float))
    return as_output(values, values)


def psi_bound_final(x, t, mu: float):
    """
    Estado ligado del pozo final: √μ·e^{−μ|x| + iμ²t}.

    Se normaliza con √μ para que ∫|ψ_Bf|² = 1 para todo μ.
    """
    mu = require_mu(mu, "psi_bound_final", positive=True)
    x_arr = np.asarray(x, dtype=float)
    values = math.sqrt(mu) * np.exp(-mu * np.abs(x_arr) + 1j * mu**2 * np.asarray(t, dtype=float))
    return as_output(values, values)


def bound_energy(mu: float) -> float:
    mu = require_mu(mu, "bound_energy", positive=True)
    return -(mu**2)


def overlap_bound_initial(mu: float) -> float:
    """⟨ψ_Bf|ψ_Bi⟩ a t = 0: 2√μ/(1+μ). Vale 0 para μ = 0 (no hay estado ligado)"""
    mu = require_mu(mu, "overlap_bound_initial")
    return 2.0 * math.sqrt(mu) / (1.0 + mu)


def bound_population(mu: float) -> float:
    """Población final del estado ligado en la aproximación súbita: 4μ/(1+μ)²"""
    mu = require_mu(mu, "bound_population")
    return 4.0 * mu / (1.0 + mu) ** 2
