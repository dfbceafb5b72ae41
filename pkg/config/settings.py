from pathlib import Path
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import ClassVar

class Settings(BaseSettings):
    # Project paths (ClassVar to exclude from pydantic fields)
    PROJECT_ROOT: ClassVar[Path] = Path(__file__).parent.parent
    OUTPUT_PATH: ClassVar[Path] = PROJECT_ROOT / "output"
    LOGS_PATH: ClassVar[Path] = PROJECT_ROOT / "logs"

    # Physical units (natural units by default)
    HBAR: float = 1.0
    MASS: float = 1.0

    # Grid settings
    GRID_POINTS: int = 4096
    MAX_GRID_POINTS: int = 2 ** 20

    # Run settings
    SEED: int = 20240601
    JOBS: int = 1
    MC_SAMPLES: int = 100_000
    LOG_LEVEL: str = "INFO"
    SCHEMA_VERSION: int = 1

    model_config = SettingsConfigDict(env_file=".env", env_prefix="LAB_", extra="ignore")

settings = Settings()
