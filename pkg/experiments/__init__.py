# Scenario runners
from typing import Dict, Type

from core.errors import ConfigError
from experiments.base_experiment import BaseExperiment
from experiments.box_model import BoxModelExperiment, run_box_model
from experiments.diffraction import DiffractionExperiment, rescaled_product, run_diffraction
from experiments.ozawa import OzawaCommutingExperiment, OzawaPositionExperiment, run_ozawa_commuting, run_ozawa_position
from experiments.preparation import PreparationExperiment, run_preparation
from experiments.slit_two_body import SlitTwoBodyExperiment, run_slit_two_body
from experiments.spin_epr import SpinEPRExperiment, run_spin_epr

SCENARIOS: Dict[str, Type[BaseExperiment]] = {
    experiment.name: experiment
    for experiment in (
        DiffractionExperiment,
        OzawaPositionExperiment,
        OzawaCommutingExperiment,
        BoxModelExperiment,
        SlitTwoBodyExperiment,
        PreparationExperiment,
        SpinEPRExperiment,
    )
}


def get_experiment(name: str) -> Type[BaseExperiment]:
    if name not in SCENARIOS:
        raise ConfigError(f"scenario: unknown scenario '{name}' (choose from {', '.join(SCENARIOS)})")
    return SCENARIOS[name]


__all__ = [
    'SCENARIOS',
    'BaseExperiment',
    'get_experiment',
    'rescaled_product',
    'run_box_model',
    'run_diffraction',
    'run_ozawa_commuting',
    'run_ozawa_position',
    'run_preparation',
    'run_slit_two_body',
    'run_spin_epr',
]
