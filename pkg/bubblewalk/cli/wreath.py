import typer
from typing import Annotated, Optional

from ..core.error_handling import guarded
from ..dependencies import parse_start
from ..schemas.experiment import HarmonicParams, SimulateParams
from ..services.wreath_service import WreathService
from .common import AlphaOption, ConfigOption, FormatOption, OutOption, Run, SeedOption, ThreadsOption, timed

app = typer.Typer(help="Switch-walk-switch walks on the lamplighter over S(alpha).", no_args_is_help=True)


@app.command("simulate")
@guarded
def simulate(
    n: Annotated[Optional[int], typer.Option("--n", help="Steps per run")] = None,
    reps: Annotated[Optional[int], typer.Option("--reps", help="Runs")] = None,
    alpha: AlphaOption = None,
    seed: SeedOption = None,
    threads: ThreadsOption = None,
    out: OutOption = None,
    format: FormatOption = None,
    config: ConfigOption = None,
):
    """Rows (replica, final_support, returned, toggles)."""
    run = Run(config, n=n, reps=reps, alpha=alpha, seed=seed, threads=threads, out=out, format=format)
    params = run.params(SimulateParams)
    service = WreathService(run.rule)
    with timed("wreath simulate"):
        rows = service.simulate_many(params.n, params.reps, run.config.seed, threads=run.config.threads)
    run.emit(rows)


@app.command("harmonic")
@guarded
def harmonic(
    start: Annotated[Optional[str], typer.Option("--start", help="lamps=<addr,...>;base=<word>")] = None,
    horizon: Annotated[Optional[int], typer.Option("--horizon", help="Steps")] = None,
    reps: Annotated[Optional[int], typer.Option("--reps", help="Runs")] = None,
    alpha: AlphaOption = None,
    seed: SeedOption = None,
    threads: ThreadsOption = None,
    out: OutOption = None,
    format: FormatOption = None,
    config: ConfigOption = None,
):
    """Estimate P(lamp at o is off at the horizon) from the given start."""
    run = Run(
        config, start=start, horizon=horizon, reps=reps, alpha=alpha,
        seed=seed, threads=threads, out=out, format=format,
    )
    params = run.params(HarmonicParams)
    service = WreathService(run.rule)
    with timed("wreath harmonic"):
        estimate = service.harmonic_estimate(
            parse_start(params.start), params.horizon, params.reps, run.config.seed, threads=run.config.threads
        )
    run.emit([estimate])
