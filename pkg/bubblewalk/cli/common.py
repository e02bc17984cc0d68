import logging
import time
from contextlib import contextmanager
from pathlib import Path
from functools import cached_property
from typing import Annotated, Any, Dict, Iterator, Optional, Sequence

import typer
from pydantic import BaseModel

from ..dependencies import experiment_config, parse_alpha, resolve_options
from ..models.scaling import ScalingRule
from ..schemas.experiment import ExperimentConfig, OutputFormat
from ..schemas.result import ResultRecord
from ..utils.output import format_value, write_rows

logger = logging.getLogger(__name__)

AlphaOption = Annotated[
    Optional[str],
    typer.Option("--alpha", help="canonical | geometric:<r> | constant:<c> | explicit:<a,b,..> | file:<path>"),
]
SeedOption = Annotated[Optional[int], typer.Option("--seed", help="Run seed")]
ThreadsOption = Annotated[Optional[int], typer.Option("--threads", help="Worker threads (0 = all cores)")]
OutOption = Annotated[Optional[Path], typer.Option("--out", help="Output file (default stdout)")]
FormatOption = Annotated[Optional[OutputFormat], typer.Option("--format", help="csv or json")]
ConfigOption = Annotated[
    Optional[Path], typer.Option("--config", help="key=value file; flags override its values")
]


class Run:
    """Resolved options of one command invocation."""

    def __init__(self, config: Optional[Path], **flags: Any):
        self.values: Dict[str, Any] = resolve_options(config, **flags)
        self.config: ExperimentConfig = experiment_config(self.values)

    @cached_property
    def rule(self) -> ScalingRule:
        return parse_alpha(self.config.alpha)

    def params(self, model: type[BaseModel]) -> Any:
        return model.model_validate(self.values)

    def emit(self, rows: Sequence[BaseModel]) -> None:
        write_rows(rows, self.config.out, self.config.format)

    def echo(self, experiment: str, metric: str, value: Any, **params: Any) -> None:
        """Print a single value, or write it as a record when --out is set."""
        if self.config.out is None and self.config.format is OutputFormat.CSV:
            typer.echo(format_value(value))
            return
        self.emit([record(experiment, metric, float(value), **params)])


def record(experiment: str, metric: str, value: float, stderr: Optional[float] = None, **params: Any) -> ResultRecord:
    echo = ";".join(f"{key}={format_value(val)}" for key, val in params.items())
    return ResultRecord(experiment=experiment, params=echo, metric=metric, value=value, stderr=stderr)


@contextmanager
def timed(name: str) -> Iterator[None]:
    """Log the wall time of a block; timings never reach the output rows."""
    started = time.perf_counter()
    yield
    logger.info("%s finished in %.3f s", name, time.perf_counter() - started)
