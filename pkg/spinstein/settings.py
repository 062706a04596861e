"""
Run configuration: built-in defaults, then a flat "key = value" file, then command-line
flags. The environment supplies the default output directory and worker cap.
"""
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from .errors import UsageError

logger = logging.getLogger(__name__)

OUTPUT_DIR_VAR = "SPINSTEIN_OUTPUT_DIR"
THREADS_VAR = "SPINSTEIN_THREADS"

_environment_loaded = False


def load_environment() -> None:
    """Read a .env file into the process environment, once."""
    global _environment_loaded
    if not _environment_loaded:
        load_dotenv()
        _environment_loaded = True


def default_output_dir() -> Path:
    return Path(os.getenv(OUTPUT_DIR_VAR, "./data"))


def default_threads() -> int:
    raw = os.getenv(THREADS_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("Ignoring %s=%r, expected an integer", THREADS_VAR, raw)
        return 1


class RunConfig(BaseModel):
    """Validated parameters shared by the subcommands."""

    q: int = 3
    beta: float = 1.0
    n: int = Field(100, ge=1)
    r: float = 0.05
    epsilon: float = 0.25
    seed: int = 0
    threads: int = Field(default_factory=default_threads)
    output_dir: Path = Field(default_factory=default_output_dir)

    @field_validator("q")
    @classmethod
    def check_q(cls, value: int) -> int:
        if value < 3:
            raise ValueError("q must be ≥ 3")
        return value

    @field_validator("beta")
    @classmethod
    def check_beta(cls, value: float) -> float:
        if value < 0:
            raise ValueError("beta must be ≥ 0")
        return value

    @field_validator("r")
    @classmethod
    def check_r(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("r must lie in (0, 1)")
        return value

    @field_validator("epsilon")
    @classmethod
    def check_epsilon(cls, value: float) -> float:
        if not 0.0 < value < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")
        return value

    @field_validator("threads")
    @classmethod
    def check_threads(cls, value: int) -> int:
        if value < 1:
            raise ValueError("threads must be ≥ 1")
        return value


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Parse a flat config file: one "key = value" per line, "#" starts a comment.

    Raises:
        UsageError on unreadable files and malformed lines
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise UsageError(f"cannot read config file {path}: {e}")
    values: Dict[str, str] = {}
    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}:{number}: expected 'key = value', got '{line}'")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def describe_validation_error(error: ValidationError) -> str:
    """One line per failed field, naming the offending flag."""
    messages = []
    for item in error.errors():
        field = ".".join(str(part) for part in item.get("loc", ()))
        message = str(item.get("msg", "invalid value")).removeprefix("Value error, ")
        messages.append(f"--{field.replace('_', '-')}: {message}" if field else message)
    return "; ".join(messages)


def build_run_config(flags: Dict[str, Any], config_path: Optional[Union[str, Path]] = None) -> RunConfig:
    """
    Merge defaults, the config file and explicit flags (flags left as None do not override).

    Raises:
        UsageError naming the offending flag when validation fails
    """
    merged: Dict[str, Any] = {}
    if config_path is not None:
        merged.update(read_config_file(config_path))
    merged.update({key: value for key, value in flags.items() if value is not None and key in RunConfig.model_fields})
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        raise UsageError(describe_validation_error(e))
