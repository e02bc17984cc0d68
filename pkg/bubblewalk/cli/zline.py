import math
import typer
from typing import Annotated, Optional

from ..core.error_handling import guarded
from ..schemas.zline import ConfineQuery
from ..services.zline_service import ZLineService
from .common import ConfigOption, FormatOption, OutOption, Run

app = typer.Typer(help="The projected lazy walk on Z.", no_args_is_help=True)


@app.command("confine")
@guarded
def confine(
    n: Annotated[Optional[int], typer.Option("--n", help="Walk length")] = None,
    m: Annotated[Optional[int], typer.Option("--m", help="Half-width of the window [-m, m]")] = None,
    log: Annotated[bool, typer.Option("--log", help="Print the natural log instead")] = False,
    out: OutOption = None,
    format: FormatOption = None,
    config: ConfigOption = None,
):
    """Exact probability that the range of the lazy walk stays in [-m, m] for n steps."""
    run = Run(config, n=n, m=m, out=out, format=format)
    query = run.params(ConfineQuery)
    result = ZLineService().confine_probability(query)
    if log:
        run.echo("zline.confine", "log_prob", result.log_prob, n=query.n, m=query.m)
        return
    prob = result.prob if result.prob is not None else math.exp(result.log_prob)
    run.echo("zline.confine", "prob", prob, n=query.n, m=query.m)
