import typer
from typing import Annotated, Optional

from ..core.error_handling import guarded
from ..models.vertex import parse_word
from ..schemas.experiment import CountParams
from ..services.group_service import GroupService
from .common import AlphaOption, ConfigOption, FormatOption, OutOption, Run, ThreadsOption, timed

app = typer.Typer(help="Words as elements of the bubble group.", no_args_is_help=True)


@app.command("equal")
@guarded
def equal(
    w1: Annotated[str, typer.Option("--w1", help="First word over a, A, b, B")],
    w2: Annotated[str, typer.Option("--w2", help="Second word over a, A, b, B")],
    alpha: AlphaOption = None,
    config: ConfigOption = None,
):
    """Prints true when both words act identically on the probe set."""
    run = Run(config, alpha=alpha)
    service = GroupService(run.rule)
    typer.echo("true" if service.elements_equal(parse_word(w1), parse_word(w2)) else "false")


@app.command("count")
@guarded
def count(
    n: Annotated[Optional[int], typer.Option("--n", help="Word length")] = None,
    m: Annotated[Optional[int], typer.Option("--m", help="Confinement scale")] = None,
    k: Annotated[Optional[float], typer.Option("--k", help="Empirical constant K")] = None,
    alpha: AlphaOption = None,
    threads: ThreadsOption = None,
    out: OutOption = None,
    format: FormatOption = None,
    config: ConfigOption = None,
):
    """Distinct elements among length-n words with small inverted orbit and displacement."""
    run = Run(config, n=n, m=m, k=k, alpha=alpha, threads=threads, out=out, format=format)
    params = run.params(CountParams)
    service = GroupService(run.rule)
    with timed("group count"):
        result = service.count_small_orbit_elements(params.n, params.m, params.k, threads=run.config.threads)
    run.emit([result])
