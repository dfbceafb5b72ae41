import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from sklearn.linear_model import LinearRegression
from sklearn.metrics import r2_score

from config.settings import settings
from core.errors import LabError
from experiments import get_experiment
from experiments.data_models import ExperimentReport
from runner.config import RunConfig, with_value

logger = logging.getLogger(__name__)

MIN_FIT_ROWS = 3


@dataclass
class SweepResult:
    scenario: str
    parameter: str
    rows: List[Dict[str, Any]] = field(default_factory=list)
    reports: List[ExperimentReport] = field(default_factory=list)
    fits: Dict[str, Dict[str, float]] = field(default_factory=dict)

    @property
    def frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows)
        if self.parameter in frame.columns:
            frame = frame[[self.parameter] + [c for c in frame.columns if c != self.parameter]]
        return frame

    @property
    def values(self) -> List[float]:
        return [row[self.parameter] for row in self.rows]

    def to_dict(self) -> dict:
        return {
            'schema_version': settings.SCHEMA_VERSION,
            'scenario': self.scenario,
            'parameter': self.parameter,
            'values': self.values,
            'fits': self.fits,
            'reports': [report.to_dict() for report in self.reports],
        }


def fit_loglog(rows: Union[SweepResult, pd.DataFrame, Sequence[Dict[str, Any]]], field: str,
               against: Optional[str] = None) -> Tuple[float, float, float]:
    """Least-squares line through (log10 x, log10 y); returns (slope, intercept, R^2)."""
    if isinstance(rows, SweepResult):
        against = against or rows.parameter
        frame = rows.frame
    else:
        frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows))
        against = against or frame.columns[0]
    if len(frame) < MIN_FIT_ROWS:
        raise LabError(f"A log-log fit needs at least {MIN_FIT_ROWS} rows, got {len(frame)}")
    for column in (against, field):
        if column not in frame.columns:
            raise LabError(f"Column '{column}' is missing from the sweep rows")
        values = pd.to_numeric(frame[column], errors="coerce")
        if values.isna().any() or (values <= 0).any():
            raise LabError(f"Column '{column}' must hold positive numbers for a log-log fit")

    x = np.log10(frame[against].to_numpy(dtype=float)).reshape(-1, 1)
    y = np.log10(frame[field].to_numpy(dtype=float))
    model = LinearRegression().fit(x, y)
    r2 = r2_score(y, model.predict(x)) if np.ptp(y) > 0 else 1.0
    return float(model.coef_[0]), float(model.intercept_), float(r2)


def _reduced_wavelength(experiment: type, params: Dict[str, Any]) -> float:
    base = experiment.validate_params(params)
    cfg = getattr(base, "diffraction", base)
    if not hasattr(cfg, "reduced_wavelength"):
        raise LabError(f"{experiment.name} has no reduced wavelength to scale sweep values by")
    return cfg.reduced_wavelength


def _run_point(experiment: type, params: Dict[str, Any]) -> ExperimentReport:
    return experiment(params).run()


def run_sweep(cfg: RunConfig, jobs: Optional[int] = None) -> SweepResult:
    if cfg.sweep is None:
        raise LabError("run_sweep needs a config with a sweep section")
    experiment = get_experiment(cfg.scenario)
    base = cfg.effective_params()
    values = cfg.sweep.resolved_values()
    if cfg.sweep.in_reduced_wavelengths:
        scale = _reduced_wavelength(experiment, base)
        values = [value * scale for value in values]
    points = [with_value(base, cfg.sweep.parameter, value) for value in values]

    jobs = jobs or cfg.jobs
    logger.info(f"Sweeping {cfg.scenario}.{cfg.sweep.parameter} over {len(values)} points with {jobs} worker(s)")
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        reports = list(executor.map(lambda params: _run_point(experiment, params), points))

    ordered = sorted(zip(values, reports), key=lambda item: item[0])
    result = SweepResult(scenario=cfg.scenario, parameter=cfg.sweep.parameter)
    for value, report in ordered:
        result.rows.append({**report.scalar_results(), cfg.sweep.parameter: value})
        result.reports.append(report)

    for name, against in experiment.fit_fields:
        if len(result.rows) < MIN_FIT_ROWS:
            break
        try:
            slope, intercept, r2 = fit_loglog(result, name, against)
        except LabError as e:
            logger.warning(f"Skipping fit of {name}: {str(e)}")
            continue
        key = name if against is None else f"{name}_vs_{against}"
        result.fits[key] = {'slope': slope, 'intercept': intercept, 'r2': r2}
        logger.info(f"Fit {key}: slope={slope:.4f}, R^2={r2:.6f}")
    return result
