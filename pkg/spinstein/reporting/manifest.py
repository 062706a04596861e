"""
Experiment manifests: everything needed to rerun a command and check its outputs.
"""
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, ValidationError

from ..errors import OutputError, UsageError

logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = ".manifest.json"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class ExperimentManifest(BaseModel):
    """
    Record of one CLI run.

    Attributes:
        command: subcommand path, for example "bench clt"
        argv: the full argument vector after the program name
        flags: parsed flag values
        outputs: output file name -> SHA-256 digest
    """

    command: str
    argv: List[str]
    flags: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    version: str
    started_at: str = Field(default_factory=utc_now)
    finished_at: Optional[str] = None
    outputs: Dict[str, str] = Field(default_factory=dict)

    def add_output(self, path: Union[str, Path], digest: str) -> None:
        self.outputs[Path(path).name] = digest

    def finish(self) -> None:
        self.finished_at = utc_now()

    def write(self, path: Union[str, Path]) -> Path:
        target = Path(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            with open(target, "w", encoding="utf-8", newline="") as handle:
                handle.write(self.model_dump_json(indent=2) + "\n")
        except OSError as e:
            raise OutputError(f"cannot write manifest {target}: {e}")
        logger.debug("Wrote manifest %s", target)
        return target

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentManifest":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise UsageError(f"cannot read manifest {path}: {e}")
        try:
            return cls.model_validate_json(text)
        except ValidationError as e:
            raise UsageError(f"{path} is not a valid manifest: {e}")


def manifest_path_for(output: Union[str, Path]) -> Path:
    """Manifest location next to an output file: data/run.csv -> data/run.csv.manifest.json."""
    output = Path(output)
    return output.with_name(output.name + MANIFEST_SUFFIX)


def compare_outputs(expected: Dict[str, str], actual: Dict[str, str]) -> List[str]:
    """Names of outputs whose digests differ or are missing."""
    return sorted(name for name in expected if actual.get(name) != expected[name])
