from .parameters import (
    BoxModelParams,
    DiffractionConfig,
    OzawaCommutingParams,
    OzawaPositionParams,
    PreparationParams,
    ScenarioParams,
    SlitTwoBodyParams,
    SpinEPRParams,
)
from .report import ExperimentReport

__all__ = [
    'BoxModelParams',
    'DiffractionConfig',
    'ExperimentReport',
    'OzawaCommutingParams',
    'OzawaPositionParams',
    'PreparationParams',
    'ScenarioParams',
    'SlitTwoBodyParams',
    'SpinEPRParams',
]
