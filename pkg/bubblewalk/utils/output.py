import csv
import json
import logging
import sys
from enum import Enum
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Sequence, TextIO

from pydantic import BaseModel

from ..core.exception import OutputException
from ..schemas.experiment import OutputFormat

logger = logging.getLogger(__name__)


def format_value(value) -> str:
    """Locale-free text for a CSV cell; floats use their shortest round-trip form."""
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@contextmanager
def _open_target(out: Optional[Path]) -> Iterator[TextIO]:
    if out is None:
        yield sys.stdout
        return
    try:
        handle = open(out, "w", newline="", encoding="utf-8")
    except OSError as ex:
        raise OutputException(str(out), ex.strerror)
    with handle:
        yield handle


def write_rows(rows: Sequence[BaseModel], out: Optional[Path] = None, fmt: OutputFormat = OutputFormat.CSV) -> None:
    """
    Write rows of one model type as CSV (header = field names) or JSON lines.

    Raises:
        OutputException: If the target cannot be written
    """
    try:
        with _open_target(out) as handle:
            if fmt is OutputFormat.JSON:
                for row in rows:
                    handle.write(json.dumps(row.model_dump(mode="json")) + "\n")
            elif rows:
                fields = list(type(rows[0]).model_fields)
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(fields)
                for row in rows:
                    writer.writerow([format_value(getattr(row, name)) for name in fields])
    except OSError as ex:
        raise OutputException(str(out or "<stdout>"), ex.strerror)
    if out is not None:
        logger.info("Wrote %d rows to %s", len(rows), out)
