from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.schemas.field import ComplexField, GridSpec
from app.schemas.survival import SurvivalSeries


class OracleConfig(BaseModel):
    """Configuración de una propagación Crank-Nicolson"""

    model_config = ConfigDict(frozen=True)

    grid: GridSpec
    dt: float = Field(..., gt=0)
    mu: float = Field(..., ge=0)
    well_width: float = Field(0.0, ge=0)  # 0 = delta en un nodo
    cap_strength: float = Field(0.0, ge=0)
    cap_width: float = Field(0.0, ge=0)

    @model_validator(mode="after")
    def check_well(self):
        h = self.grid.h
        if self.well_width > 0:
            if self.well_width < h * (1 - 1e-9):
                raise ValueError("well narrower than one grid cell")
            cells = self.well_width / h
            if abs(cells - round(cells)) > 1e-6:
                raise ValueError("well_width debe ser múltiplo entero del paso h")
        if self.cap_width >= 0.5 * (self.grid.x_max - self.grid.x_min):
            raise ValueError("cap_width ocupa toda la caja")
        return self

    def with_mu(self, mu: float, absorbing: bool = True) -> "OracleConfig":
        """Misma grilla y pozo con otra intensidad (y opcionalmente sin CAP)"""
        update = {"mu": mu}
        if not absorbing:
            update.update(cap_strength=0.0, cap_width=0.0)
        return self.model_copy(update=update)


class FieldComparison(BaseModel):
    """Distancias entre dos campos sobre la misma grilla"""

    l2_abs: float
    l2_rel: float
    linf: float
    overlap_re: float
    overlap_im: float

    @property
    def overlap(self) -> complex:
        return complex(self.overlap_re, self.overlap_im)


class QuenchResult(BaseModel):
    """Resultado de quench_experiment"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: OracleConfig
    series: SurvivalSeries
    snapshots: List[ComplexField]
    initial_energy: float
    final_energy: Optional[float] = None  # None si el pozo final no liga

    def snapshot_at(self, t: float) -> ComplexField:
        for snapshot in self.snapshots:
            if abs(snapshot.time - t) <= 1e-9 * max(1.0, t):
                return snapshot
        raise KeyError(f"No hay snapshot en t={t}")


class FiniteWidthReport(BaseModel):
    """Comparación pozo finito (oráculo) vs modelo delta"""

    well_width: float
    mu: float
    mu_matched: float
    time_scale: float
    times: List[float]
    p_oracle: List[float]
    p_strength_rule: List[float]
    p_matched: List[float]
    rel_error_p: List[float]
    rel_error_escape: List[float]
    rel_error_p_strength_rule: List[float]
    notes: Dict[str, str] = {}


class MatchedDeltaParams(BaseModel):
    """Modelo delta equivalente a un pozo cuadrado de ancho Δx (energías medidas)"""

    well_width: float
    mu: float
    kappa_initial: float = Field(..., gt=0)
    kappa_final: float = Field(..., ge=0)

    @property
    def mu_effective(self) -> float:
        return self.kappa_final / self.kappa_initial

    @property
    def time_scale(self) -> float:
        """t del modelo delta equivalente = κ_i² · t"""
        return self.kappa_initial**2


class BoundProjection(BaseModel):
    """Proyección de un campo propagado sobre el estado ligado final normalizado"""

    time: float
    mu: float
    overlap_re: float
    overlap_im: float

    @property
    def overlap(self) -> complex:
        return complex(self.overlap_re, self.overlap_im)

    @property
    def population(self) -> float:
        return abs(self.overlap) ** 2

    @property
    def coefficient(self) -> float:
        """|C_B| en ψ → C_B·e^{iμ²t−μ|x|}; el límite exacto es 2μ/(1+μ)"""
        return abs(self.overlap) * self.mu**0.5
