import logging
import typer
from typing import Annotated, Optional

from ..core.error_handling import guarded
from ..core.exception import NoDataException
from ..schemas.experiment import OrbitParams
from ..schemas.orbit import Sampler
from ..services.orbit_service import OrbitService
from .common import AlphaOption, ConfigOption, FormatOption, OutOption, Run, SeedOption, ThreadsOption, timed

logger = logging.getLogger(__name__)

app = typer.Typer(help="Inverted orbits and displacement of random words.", no_args_is_help=True)

UNCONDITIONED_RADIUS = 4

NOption = Annotated[Optional[int], typer.Option("--n", help="Word length")]
MOption = Annotated[Optional[int], typer.Option("--m", help="Confinement half-width")]
RepsOption = Annotated[Optional[int], typer.Option("--reps", help="Words to draw")]
RadiusOption = Annotated[
    Optional[int], typer.Option("--test-radius", help="Displacement probe radius (default m)")
]
SamplerOption = Annotated[
    Optional[Sampler], typer.Option("--sampler", help="Force rejection or bridge sampling of A_{n,m}")
]


@app.command("sample")
@guarded
def sample(
    n: NOption = None,
    m: MOption = None,
    reps: RepsOption = None,
    test_radius: RadiusOption = None,
    sampler: SamplerOption = None,
    alpha: AlphaOption = None,
    seed: SeedOption = None,
    threads: ThreadsOption = None,
    out: OutOption = None,
    format: FormatOption = None,
    config: ConfigOption = None,
):
    """One row per replica; with --m the words are conditioned on A_{n,m}."""
    run = Run(
        config, n=n, m=m, reps=reps, test_radius=test_radius, sampler=sampler, alpha=alpha,
        seed=seed, threads=threads, out=out, format=format,
    )
    params = run.params(OrbitParams)
    service = OrbitService(run.rule)
    conditioned = params.m is not None
    width = params.m if conditioned else (params.test_radius or UNCONDITIONED_RADIUS)
    with timed("orbit sample"):
        report, rows = service.conditioned_orbit_stats(
            params.n,
            width,
            params.reps,
            run.config.seed,
            threads=run.config.threads,
            condition=conditioned,
            test_radius=params.test_radius,
            sampler=params.sampler,
        )
    logger.info("Accepted %d of %d words", report.accepted, report.reps)
    run.emit(rows)


@app.command("condition")
@guarded
def condition(
    n: NOption = None,
    m: MOption = None,
    reps: RepsOption = None,
    test_radius: RadiusOption = None,
    sampler: SamplerOption = None,
    alpha: AlphaOption = None,
    seed: SeedOption = None,
    threads: ThreadsOption = None,
    out: OutOption = None,
    format: FormatOption = None,
    config: ConfigOption = None,
):
    """Confinement report: orbit radius and displacement over m of conditioned words."""
    run = Run(
        config, n=n, m=m, reps=reps, test_radius=test_radius, sampler=sampler, alpha=alpha,
        seed=seed, threads=threads, out=out, format=format,
    )
    params = run.params(OrbitParams)
    if params.m is None:
        raise typer.BadParameter("--m is required", param_hint="--m")
    service = OrbitService(run.rule)
    with timed("orbit condition"):
        report, _ = service.conditioned_orbit_stats(
            params.n, params.m, params.reps, run.config.seed,
            threads=run.config.threads, test_radius=params.test_radius, sampler=params.sampler,
        )
    if not report.has_data:
        raise NoDataException()
    run.emit([report])
