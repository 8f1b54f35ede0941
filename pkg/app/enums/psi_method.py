from enum import Enum


class PsiMethod(str, Enum):
    """Formas de evaluar ψ(x, t) sobre una grilla"""

    EXACT = "exact"
    KERNEL = "kernel"
    SHORTTIME = "shorttime"
    LONGTIME = "longtime"
    FARFIELD = "farfield"
    ORACLE = "oracle"
