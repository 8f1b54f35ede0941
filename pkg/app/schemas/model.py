import math
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ModelParams(BaseModel):
    """Parámetros del quench: μ = λ/α y, opcionalmente, el par físico (α, λ)"""

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    mu: float = Field(..., ge=0)
    alpha: Optional[float] = Field(None, gt=0)
    lambda_: Optional[float] = Field(None, ge=0, alias="lambda")

    @model_validator(mode="after")
    def check_ratio(self):
        if self.alpha is not None and self.lambda_ is not None:
            expected = self.lambda_ / self.alpha
            if abs(self.mu - expected) > 1e-14 * max(1.0, abs(expected)):
                raise ValueError(f"mu={self.mu} no coincide con lambda/alpha={expected}")
        return self

    @classmethod
    def from_physical(cls, alpha: float, lambda_: float) -> "ModelParams":
        return cls(mu=lambda_ / alpha, alpha=alpha, lambda_=lambda_)

    @property
    def unit_map(self) -> Optional["UnitMap"]:
        return UnitMap(alpha=self.alpha) if self.alpha is not None else None


class UnitMap(BaseModel):
    """
    Conversión entre variables adimensionales y físicas (ħ = 1, 2m = 1).

    x_físico = x / α,  t_físico = t / α²
    """

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0)

    @field_validator("alpha")
    @classmethod
    def finite_alpha(cls, v):
        if not math.isfinite(v):
            raise ValueError("alpha debe ser finito")
        return v

    def to_physical(self, x: float, t: float) -> Tuple[float, float]:
        return x / self.alpha, t / self.alpha**2

    def to_dimensionless(self, x_physical: float, t_physical: float) -> Tuple[float, float]:
        return x_physical * self.alpha, t_physical * self.alpha**2
