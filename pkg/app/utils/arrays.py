"""Conversión entre escalares y arreglos numpy para las funciones vectorizadas"""
import numpy as np


def as_output(values, like):
    """
    Devuelve `values` como escalar de Python si `like` es escalar.

    Args:
        values: Resultado numpy de la evaluación vectorizada
        like: Entrada original (o el resultado, si ya tiene la forma final)
    """
    if np.ndim(like) != 0:
        return values
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return complex(values)
    return float(values)
