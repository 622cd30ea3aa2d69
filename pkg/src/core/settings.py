"""Engine settings loaded from TENSOR_ENVELOPE_* environment variables"""

import logging
import os
import threading
from pathlib import Path
from typing import Literal, Optional

import psutil
from dotenv import load_dotenv
from pydantic import BaseModel, Field


ENV_PREFIX = "TENSOR_ENVELOPE_"

logger = logging.getLogger(__name__)


class EngineSettings(BaseModel):
    """Size guards, verification bounds and logging level"""

    finset_max_size: int = Field(default=12, ge=1, description="FinSet subobject lattice guard")
    opset_max_size: int = Field(default=8, ge=0, description="OpSet subobject lattice guard")
    sweep_table_limit: int = Field(default=256, ge=1, description="Largest morphism sweep")
    verify_max_size: int = Field(default=3, ge=1, description="Carrier bound for axiom suites")
    oracle_total_size: int = Field(default=6, ge=1, description="OpSet total carrier for oracle suites")
    oracle_constant_total_size: int = Field(
        default=4, ge=1, description="OpSet total carrier for oracle suites under constant degree functions"
    )
    finset_oracle_size: int = Field(default=2, ge=1, description="FinSet carrier for oracle suites")
    verify_workers: Optional[int] = Field(default=None, ge=1, description="Threads for verify")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "WARNING"

    def max_size(self, backend: str) -> int:
        return self.finset_max_size if backend == "finset" else self.opset_max_size

    def workers(self) -> int:
        """Configured worker count, else the number of physical cores"""
        if self.verify_workers:
            return self.verify_workers
        return psutil.cpu_count(logical=False) or 1


def load_settings(env_file: Optional[Path] = None) -> EngineSettings:
    """
    Build settings from the environment.

    Args:
        env_file: Optional .env file; defaults to a .env in the working directory

    Returns:
        Validated EngineSettings

    Raises:
        pydantic.ValidationError: If a variable has an invalid value
    """
    load_dotenv(dotenv_path=env_file, override=False)
    values = {}
    for name in EngineSettings.model_fields:
        raw = os.environ.get(ENV_PREFIX + name.upper())
        if raw is not None and raw != "":
            values[name] = raw.upper() if name == "log_level" else raw
    settings = EngineSettings.model_validate(values)
    logger.debug("loaded settings %s", settings.model_dump())
    return settings


_settings: Optional[EngineSettings] = None
_settings_lock = threading.Lock()


def get_settings() -> EngineSettings:
    """Process-wide settings, loaded on first use"""
    global _settings
    with _settings_lock:
        if _settings is None:
            _settings = load_settings()
        return _settings


def set_settings(settings: Optional[EngineSettings]) -> None:
    """Replace the process-wide settings (None reloads on next access)"""
    global _settings
    with _settings_lock:
        _settings = settings
