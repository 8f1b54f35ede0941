from enum import Enum


class FitQuantity(str, Enum):
    """Qué serie se ajusta con una ley de potencias"""

    ESCAPE = "escape"  # 1 - P(t), régimen de tiempos cortos
    ENVELOPE = "envelope"  # máximos de |P - P(∞)|, régimen de tiempos largos
