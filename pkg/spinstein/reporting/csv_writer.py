"""
Deterministic CSV output.

Columns follow the given schema order, floats carry 12 significant digits, missing values
are empty fields and every line ends with a single newline, so equal records always give
byte-identical files.
"""
import hashlib
import io
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Union

import pandas as pd

from ..errors import OutputError, UsageError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"


def render_csv(records: Iterable[Dict[str, Any]], columns: List[str]) -> str:
    rows = list(records)
    for i, row in enumerate(rows):
        unknown = set(row) - set(columns)
        if unknown:
            raise UsageError(f"record {i} has columns outside the schema: {sorted(unknown)}")
    frame = pd.DataFrame(rows, columns=columns)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", na_rep="")
    return buffer.getvalue()


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def digest_file(path: Union[str, Path]) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as e:
        raise OutputError(f"cannot read {path}: {e}")


def write_csv(records: Iterable[Dict[str, Any]], columns: List[str], path: Union[str, Path]) -> str:
    """
    Write records as CSV with a header row in schema order.

    Returns:
        SHA-256 hex digest of the written bytes

    Raises:
        OutputError if the file cannot be written
    """
    text = render_csv(records, columns)
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as e:
        raise OutputError(f"cannot write {target}: {e}")
    digest = digest_text(text)
    logger.info("Wrote %s (%s)", target, digest[:12])
    return digest
