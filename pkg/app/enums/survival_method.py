from enum import Enum


class SurvivalMethod(str, Enum):
    """Procedencia de una serie A(t), P(t)"""

    EXACT = "exact"
    QUADRATURE = "quadrature"
    SHORT_TIME = "short_time"
    LONG_TIME = "long_time"
    ORACLE = "oracle"
