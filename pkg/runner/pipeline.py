import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional, Union

from config.settings import settings
from core.errors import LabError, ScenarioError
from experiments import get_experiment
from experiments.data_models import ExperimentReport
from runner.config import RunConfig
from runner.sweep import SweepResult, run_sweep
from runner.writers import write_csv, write_json


def setup_logging(log_to_file: bool = True):
    """Setup logging for lab runs"""
    handlers = [logging.StreamHandler()]
    if log_to_file:
        log_dir = settings.LOGS_PATH
        log_dir.mkdir(parents=True, exist_ok=True)
        handlers.insert(0, logging.FileHandler(log_dir / f"lab_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"))

    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )


class LabPipeline:
    def __init__(self, output_dir: Union[str, Path, None] = None, log_to_file: bool = True):
        self.output_dir = Path(output_dir) if output_dir else None
        self.log_to_file = log_to_file
        setup_logging(log_to_file)
        self.logger = logging.getLogger(__name__)

    def resolve_output_dir(self, cfg: RunConfig) -> Path:
        if self.output_dir is not None:
            return self.output_dir
        return Path(cfg.output_dir) if cfg.output_dir else settings.OUTPUT_PATH

    def run_scenario(self, cfg: RunConfig) -> ExperimentReport:
        try:
            experiment = get_experiment(cfg.scenario)(cfg.effective_params())
            report = experiment.run()
        except ScenarioError:
            raise
        except LabError as e:
            self.logger.error(f"{cfg.scenario} failed: {str(e)}")
            raise ScenarioError(f"{cfg.scenario} failed: {str(e)}") from e
        self.log_report(report)
        return report

    def run_sweep(self, cfg: RunConfig, jobs: Optional[int] = None) -> SweepResult:
        try:
            result = run_sweep(cfg, jobs)
        except LabError as e:
            self.logger.error(f"{cfg.scenario} sweep failed: {str(e)}")
            raise ScenarioError(f"{cfg.scenario} sweep over {cfg.sweep.parameter} failed: {str(e)}") from e
        self.log_sweep(result)
        return result

    def run(self, cfg: RunConfig, jobs: Optional[int] = None) -> Dict[str, Path]:
        """Run a scenario or a sweep and write its files; returns the written paths."""
        self.logger.info(f"Starting {cfg.scenario} run...")
        out = self.resolve_output_dir(cfg)
        if cfg.sweep is None:
            report = self.run_scenario(cfg)
            written = {'report': write_json(out / f"{cfg.scenario}.json", report.to_dict())}
        else:
            result = self.run_sweep(cfg, jobs)
            stem = f"{cfg.scenario}_sweep_{cfg.sweep.parameter.replace('.', '_')}"
            written = {
                'report': write_json(out / f"{stem}.json", result.to_dict()),
                'csv': write_csv(out / f"{stem}.csv", result.frame),
            }
        for kind, path in written.items():
            self.logger.info(f"Wrote {kind}: {path}")
        return written

    def log_report(self, report: ExperimentReport):
        """Log a summary block for a scenario report"""
        self.logger.info(f"=== {report.scenario.upper()} REPORT ===")
        for key, value in report.scalar_results().items():
            self.logger.info(f"{key}: {value}")
        for note in report.notes:
            self.logger.info(f"note: {note}")

    def log_sweep(self, result: SweepResult):
        self.logger.info(f"=== {result.scenario.upper()} SWEEP ({result.parameter}) ===")
        self.logger.info(f"Points: {len(result.rows)}")
        for name, fit in result.fits.items():
            self.logger.info(f"{name}: slope={fit['slope']:.4f}, intercept={fit['intercept']:.4f}, R^2={fit['r2']:.6f}")
