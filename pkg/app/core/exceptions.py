"""
Excepciones del paquete.

Todas heredan de DeltaQuenchError para que la CLI pueda capturarlas en un
solo lugar y convertirlas en un código de salida.
"""

from typing import Optional


class DeltaQuenchError(Exception):
    """Base de los errores propios del paquete"""


class ParameterError(DeltaQuenchError, ValueError):
    """Parámetro fuera de su dominio (μ negativo, t ≤ 0, grilla inválida)"""


class RegimeError(ParameterError):
    """Una aproximación asintótica se evaluó fuera de su dominio de validez"""

    def __init__(self, operation: str, condition: str):
        self.operation = operation
        self.condition = condition
        super().__init__(f"{operation}: outside asymptotic domain (requires {condition})")


class QuadratureError(DeltaQuenchError, RuntimeError):
    """La cuadratura adaptativa no alcanzó la tolerancia pedida"""

    def __init__(self, message: str, achieved_error: Optional[float] = None):
        self.achieved_error = achieved_error
        if achieved_error is not None:
            message = f"{message} (achieved error estimate {achieved_error:.3e})"
        super().__init__(message)


class SolverError(DeltaQuenchError, RuntimeError):
    """Falla del solver tridiagonal o del autovalor fundamental"""


class GridMismatchError(DeltaQuenchError, ValueError):
    """Dos campos definidos sobre grillas distintas"""


class FitError(DeltaQuenchError, ValueError):
    """Datos insuficientes o no positivos para un ajuste log-log"""
