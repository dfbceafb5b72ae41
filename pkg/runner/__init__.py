from .config import RunConfig, SweepSpec, parse_config, serialize_config
from .pipeline import LabPipeline
from .sweep import SweepResult, fit_loglog, run_sweep

__all__ = ['LabPipeline', 'RunConfig', 'SweepResult', 'SweepSpec', 'fit_loglog', 'parse_config', 'run_sweep',
           'serialize_config']
