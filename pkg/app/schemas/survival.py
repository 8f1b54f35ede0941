import math
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.enums.fit_quantity import FitQuantity
from app.enums.survival_method import SurvivalMethod

PROBABILITY_SLACK = 1e-9


class SurvivalSeries(BaseModel):
    """Muestras temporales de A(t) y P(t) = |A(t)|² con su procedencia"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray
    amplitudes: np.ndarray
    probabilities: np.ndarray
    mu: float
    method: SurvivalMethod

    @field_validator("times", "probabilities", mode="before")
    @classmethod
    def as_real_array(cls, v):
        return np.asarray(v, dtype=float)

    @field_validator("amplitudes", mode="before")
    @classmethod
    def as_complex_array(cls, v):
        return np.asarray(v, dtype=np.complex128)

    @model_validator(mode="after")
    def check_consistency(self):
        n = self.times.size
        if self.amplitudes.size != n or self.probabilities.size != n:
            raise ValueError("times, amplitudes y probabilities deben tener el mismo largo")
        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times debe ser estrictamente creciente")
        if n and self.times[0] < 0:
            raise ValueError("times debe ser no negativo")

        finite = np.isfinite(self.probabilities)
        p = self.probabilities[finite]
        if np.any(p < -PROBABILITY_SLACK) or np.any(p > 1 + PROBABILITY_SLACK):
            raise ValueError("probabilities fuera de [0, 1]")
        expected = np.minimum(np.abs(self.amplitudes[finite]) ** 2, 1.0)
        if np.any(np.abs(p - expected) > 1e-14):
            raise ValueError("probabilities no coincide con |amplitudes|²")
        return self

    @classmethod
    def from_amplitudes(cls, times, amplitudes, mu: float, method: SurvivalMethod) -> "SurvivalSeries":
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        return cls(
            times=times,
            amplitudes=amplitudes,
            probabilities=np.minimum(np.abs(amplitudes) ** 2, 1.0),
            mu=mu,
            method=method,
        )

    def escape(self) -> np.ndarray:
        """1 - P(t) sin cancelación: 2·Re(1 - A) - |1 - A|²"""
        d = 1.0 - self.amplitudes
        return 2.0 * d.real - np.abs(d) ** 2


class PowerLawFit(BaseModel):
    """Ajuste y ≈ coefficient · t^exponent en una ventana log-log"""

    exponent: float
    coefficient: float = Field(..., gt=0)
    rms_log_residual: float = Field(..., ge=0)
    window: Tuple[float, float]
    n_samples: int
    pinned_exponent: bool = False

    @field_validator("window")
    @classmethod
    def check_window(cls, v):
        if not v[0] < v[1]:
            raise ValueError("la ventana debe cumplir t_lo < t_hi")
        return v

    @field_validator("rms_log_residual")
    @classmethod
    def finite_residual(cls, v):
        if not math.isfinite(v):
            raise ValueError("residuo no finito")
        return v


class ExponentialFit(BaseModel):
    """Ajuste y ≈ amplitude · e^{−rate·t} (recta en log y vs t)"""

    rate: float
    amplitude: float = Field(..., gt=0)
    rms_log_residual: float = Field(..., ge=0)
    window: Tuple[float, float]
    n_samples: int


class FitReport(BaseModel):
    """Reporte JSON de `fit`"""

    quantity: FitQuantity
    source: str  # ruta del CSV de entrada o "generated"
    mu: Optional[float] = None
    fit: PowerLawFit
