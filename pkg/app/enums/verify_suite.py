from enum import Enum


class VerifySuite(str, Enum):
    """Suites de aceptación que corre `verify`"""

    CERF = "cerf"
    EXACT = "exact"
    SURVIVAL = "survival"
    ORACLE = "oracle"
    ALL = "all"
