import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Union

import pandas as pd

from core.grid import GridWaveFn, as_momentum, as_position

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _atomic_write(path: PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.debug(f"Wrote {path}")
    return path


def dumps_report(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(path: PathLike, payload: Dict[str, Any]) -> Path:
    return _atomic_write(path, dumps_report(payload))


def write_csv(path: PathLike, frame: pd.DataFrame) -> Path:
    return _atomic_write(path, frame.to_csv(index=False, lineterminator="\n"))


def write_density_csv(path: PathLike, wf: GridWaveFn, representation: str = "position") -> Path:
    """Two columns: coordinate and probability density."""
    if representation == "position":
        wf = as_position(wf)
        frame = pd.DataFrame({'x': wf.grid.positions, 'density': wf.density})
    else:
        wf = as_momentum(wf)
        frame = pd.DataFrame({'p': wf.grid.momenta, 'density': wf.density})
    return write_csv(path, frame)
