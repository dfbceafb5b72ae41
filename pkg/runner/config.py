import json

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config.settings import settings
from core.errors import ConfigError
from experiments import SCENARIOS, get_experiment
from experiments.base_experiment import format_validation_error
from experiments.data_models import ScenarioParams


def with_value(params: Dict[str, Any], parameter: str, value: float) -> Dict[str, Any]:
    """Copy of ``params`` with a (possibly dotted) parameter set."""
    head, *rest = parameter.split(".")
    updated = dict(params)
    if rest:
        nested = updated.get(head) or {}
        if isinstance(nested, BaseModel):
            nested = nested.model_dump()
        updated[head] = with_value(dict(nested), ".".join(rest), value)
    else:
        updated[head] = value
    return updated


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    parameter: str
    values: Optional[List[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    points: Optional[int] = Field(None, ge=2)
    log: bool = True
    in_reduced_wavelengths: bool = False

    @model_validator(mode="after")
    def check_range(self):
        explicit = self.values is not None
        ranged = None not in (self.start, self.stop, self.points)
        if explicit == ranged:
            raise ValueError("give either 'values' or all of 'start', 'stop' and 'points'")
        if explicit and not self.values:
            raise ValueError("'values' must not be empty")
        return self

    def resolved_values(self) -> List[float]:
        """Sweep points in ascending order."""
        if self.values is not None:
            return sorted(float(value) for value in self.values)
        if self.log:
            if self.start <= 0 or self.stop <= 0:
                raise ValueError("log-spaced sweeps need positive 'start' and 'stop'")
            grid = np.geomspace(self.start, self.stop, self.points)
        else:
            grid = np.linspace(self.start, self.stop, self.points)
        return sorted(float(value) for value in grid)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    scenario: str
    params: Dict[str, Any] = Field(default_factory=dict)
    sweep: Optional[SweepSpec] = None
    output_dir: Optional[str] = None
    hbar: Optional[float] = Field(None, gt=0)
    grid_points: Optional[int] = Field(None, ge=16)
    seed: Optional[int] = None
    jobs: int = Field(default_factory=lambda: settings.JOBS, ge=1)

    @field_validator("scenario")
    @classmethod
    def check_scenario(cls, value: str) -> str:
        if value not in SCENARIOS:
            raise ValueError(f"unknown scenario '{value}' (choose from {', '.join(SCENARIOS)})")
        return value

    def effective_params(self) -> Dict[str, Any]:
        """Scenario parameters with the top-level hbar / grid / seed overrides folded in."""
        fields = get_experiment(self.scenario).params_model.model_fields
        merged = dict(self.params)
        for key in ("hbar", "grid_points", "seed"):
            value = getattr(self, key)
            if value is not None and key in fields:
                merged.setdefault(key, value)
        if self.hbar is not None and "diffraction" in fields:
            nested = dict(merged.get("diffraction") or {})
            nested.setdefault("hbar", self.hbar)
            merged["diffraction"] = nested
        return merged

    def scenario_params(self) -> ScenarioParams:
        experiment = get_experiment(self.scenario)
        params = experiment.validate_params(self.effective_params())
        if self.sweep is not None:
            head, *rest = self.sweep.parameter.split(".")
            model = type(params)
            if head not in model.model_fields or (rest and not isinstance(getattr(params, head), BaseModel)):
                raise ConfigError(f"sweep.parameter: '{self.sweep.parameter}' is not a parameter of {self.scenario}")
            if rest and rest[0] not in type(getattr(params, head)).model_fields:
                raise ConfigError(f"sweep.parameter: '{self.sweep.parameter}' is not a parameter of {self.scenario}")
            base = self.effective_params()
            for value in self.sweep.resolved_values():
                try:
                    experiment.validate_params(with_value(base, self.sweep.parameter, value))
                except ConfigError as e:
                    raise ConfigError(f"sweep.values: {self.sweep.parameter}={value:g} is rejected ({e})") from e
        return params


def _load_document(text: str) -> Dict[str, Any]:
    stripped = text.strip()
    try:
        if stripped.startswith("{"):
            return json.loads(stripped)
        return tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"Config document is not valid: {e}") from e


def parse_config(text: str) -> RunConfig:
    data = _load_document(text)
    if not isinstance(data, dict):
        raise ConfigError("Config document must be a table/object at the top level")
    try:
        cfg = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(format_validation_error(e)) from e
    cfg.scenario_params()
    return cfg


def serialize_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.model_dump(mode="json", exclude_none=True), indent=2, sort_keys=True)
