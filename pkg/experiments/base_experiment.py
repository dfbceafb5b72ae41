import logging
import time
from abc import ABC, abstractmethod
from typing import Any, ClassVar, Dict, List, Optional, Tuple, Type, Union

from pydantic import ValidationError

from core.errors import ConfigError
from experiments.data_models import ExperimentReport, ScenarioParams


def format_validation_error(error: ValidationError, prefix: str = "") -> str:
    """'params.detector_size: Input should be greater than 0' style messages."""
    messages = []
    for item in error.errors():
        path = ".".join(str(part) for part in (prefix, *item['loc']) if part != "")
        messages.append(f"{path or '<root>'}: {item['msg']}")
    return "; ".join(messages)


class BaseExperiment(ABC):
    name: ClassVar[str]
    description: ClassVar[str] = ""
    params_model: ClassVar[Type[ScenarioParams]]
    # (report field, abscissa field or None for the swept parameter) pairs fitted in sweeps
    fit_fields: ClassVar[List[Tuple[str, Optional[str]]]] = []

    def __init__(self, params: Union[ScenarioParams, Dict[str, Any], None] = None):
        self.params = self.validate_params(params)
        self.logger = logging.getLogger(f"experiments.{self.name}")

    @classmethod
    def validate_params(cls, params: Union[ScenarioParams, Dict[str, Any], None]) -> ScenarioParams:
        if isinstance(params, cls.params_model):
            return params
        try:
            return cls.params_model(**(params or {}))
        except ValidationError as e:
            raise ConfigError(format_validation_error(e, "params")) from e

    @abstractmethod
    def prepare(self) -> Dict[str, Any]:
        """Build the states the scenario measures."""
        pass

    @abstractmethod
    def analyze(self, states: Dict[str, Any]) -> ExperimentReport:
        pass

    def new_report(self) -> ExperimentReport:
        return ExperimentReport(scenario=self.name, inputs=self.params.model_dump(mode="json"))

    def run(self) -> ExperimentReport:
        started = time.perf_counter()
        self.logger.info(f"Running {self.name}...")
        states = self.prepare()
        report = self.analyze(states)
        report.validate()
        self.logger.info(
            f"{self.name} finished in {time.perf_counter() - started:.2f}s "
            f"(evasion={report.evasion.get('flag')}, sector probability={report.evasion.get('sector_probability')})"
        )
        return report
