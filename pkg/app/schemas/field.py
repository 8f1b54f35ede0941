from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class GridSpec(BaseModel):
    """Grilla espacial uniforme de n_points nodos entre x_min y x_max"""

    model_config = ConfigDict(frozen=True)

    x_min: float
    x_max: float
    n_points: int = Field(..., ge=2)

    @model_validator(mode="after")
    def check_bounds(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min debe ser menor que x_max")
        return self

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @classmethod
    def symmetric(cls, half_width: float, h: float) -> "GridSpec":
        """Grilla [-L, L] con paso h que contiene al nodo x = 0"""
        n_half = int(round(half_width / h))
        return cls(x_min=-n_half * h, x_max=n_half * h, n_points=2 * n_half + 1)


class ComplexField(BaseModel):
    """Muestras de ψ(x, t) sobre una grilla"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: GridSpec
    values: np.ndarray
    time: float = Field(..., ge=0)
    mu: float
    energy: Optional[float] = None  # solo para autoestados

    @field_validator("values", mode="before")
    @classmethod
    def as_complex_array(cls, v):
        return np.asarray(v, dtype=np.complex128)

    @model_validator(mode="after")
    def check_length(self):
        if self.values.shape != (self.grid.n_points,):
            raise ValueError(
                f"values tiene {self.values.size} muestras, la grilla {self.grid.n_points}"
            )
        return self

    @property
    def x(self) -> np.ndarray:
        return self.grid.points()

    def abs2(self) -> np.ndarray:
        return np.abs(self.values) ** 2
