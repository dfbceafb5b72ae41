import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from config.settings import settings
from core.errors import LabError
from measurement.models import NoiseReport


def _plain(value: Any) -> Any:
    """JSON-friendly scalars: numpy types unwrapped, non-finite floats become null."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (np.complexfloating, complex)):
        return {'re': _plain(value.real), 'im': _plain(value.imag)}
    return value


@dataclass
class ExperimentReport:
    scenario: str
    inputs: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    noise: Dict[str, NoiseReport] = field(default_factory=dict)
    fits: Dict[str, Dict[str, float]] = field(default_factory=dict)
    evasion: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def record(self, key: str, value: Any):
        self.results[key] = value

    def set_evasion(self, flag: bool, sector_probability: Optional[float], product: Optional[float] = None,
                    channel: str = ""):
        self.evasion = {
            'flag': bool(flag),
            'sector_probability': sector_probability,
            'product': product,
            'channel': channel,
        }

    def probabilities(self) -> Dict[str, float]:
        """Every probability-valued field, by key."""
        found = {key: value for key, value in self.results.items()
                 if 'probability' in key and isinstance(value, (int, float)) and value is not None}
        for name, noise in self.noise.items():
            found[f"noise.{name}.sector_probability"] = noise.sector_probability
        if self.evasion.get('sector_probability') is not None:
            found['evasion.sector_probability'] = self.evasion['sector_probability']
        return found

    def validate(self):
        slack = 1e-12
        for key, value in self.probabilities().items():
            if not -slack <= value <= 1 + slack:
                raise LabError(f"{self.scenario}: probability field {key} = {value} outside [0, 1]")
        if self.evasion.get('flag') and self.evasion.get('sector_probability') is None:
            raise LabError(f"{self.scenario}: evasion flagged without a sector probability")

    def scalar_results(self) -> Dict[str, Any]:
        """Flat numeric/boolean results for sweep rows."""
        row = {key: value for key, value in self.results.items()
               if isinstance(value, (bool, int, float, np.floating, np.integer)) or value is None}
        row['evasion'] = self.evasion.get('flag')
        row['evasion_sector_probability'] = self.evasion.get('sector_probability')
        return _plain(row)

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization"""
        return _plain({
            'schema_version': settings.SCHEMA_VERSION,
            'scenario': self.scenario,
            'inputs': self.inputs,
            'results': self.results,
            'noise': {name: report.to_dict() for name, report in self.noise.items()},
            'fits': self.fits,
            'evasion': self.evasion,
            'notes': self.notes,
        })
