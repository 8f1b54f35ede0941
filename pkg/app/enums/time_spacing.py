from enum import Enum


class TimeSpacing(str, Enum):
    LINEAR = "linear"
    LOG = "log"
