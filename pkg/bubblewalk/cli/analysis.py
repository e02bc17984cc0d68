import math
import typer
from typing import Annotated, List, Optional

import numpy as np

from ..core.error_handling import guarded
from ..schemas.analysis import CountingConstants
from ..schemas.experiment import BoundParams, FlowParams, GreenParams, VolumeParams
from ..services.analysis_service import AnalysisService
from .common import AlphaOption, ConfigOption, FormatOption, OutOption, Run, SeedOption, ThreadsOption, timed

app = typer.Typer(help="Transience, volume growth and the return-probability bound.", no_args_is_help=True)


def decades(low: float, high: float) -> List[int]:
    """Powers of ten from low to high inclusive."""
    first, last = math.ceil(math.log10(low) - 1e-9), math.floor(math.log10(high) + 1e-9)
    return [10**e for e in range(first, last + 1)]


@app.command("flow")
@guarded
def flow(
    k_max: Annotated[Optional[int], typer.Option("--k-max", help="Deepest level")] = None,
    alpha: AlphaOption = None,
    out: OutOption = None,
    format: FormatOption = None,
    config: ConfigOption = None,
):
    """Partial energies E_K of the unit flow and the convergence verdict."""
    run = Run(config, k_max=k_max, alpha=alpha, out=out, format=format)
    params = run.params(FlowParams)
    run.emit(AnalysisService(run.rule).flow_energy(params.k_max).rows())


@app.command("green")
@guarded
def green(
    n: Annotated[Optional[int], typer.Option("--n", help="Longest time")] = None,
    reps: Annotated[Optional[int], typer.Option("--reps", help="Walkers")] = None,
    alpha: AlphaOption = None,
    seed: SeedOption = None,
    threads: ThreadsOption = None,
    out: OutOption = None,
    format: FormatOption = None,
    config: ConfigOption = None,
):
    """Expected visits to o up to T = 0, n/4, n/2, n."""
    run = Run(config, n=n, reps=reps, alpha=alpha, seed=seed, threads=threads, out=out, format=format)
    params = run.params(GreenParams)
    with timed("analysis green"):
        estimate = AnalysisService(run.rule).green_function_estimate(
            params.n, params.reps, run.config.seed, threads=run.config.threads
        )
    run.emit(estimate.rows())


@app.command("volume")
@guarded
def volume(
    rmin: Annotated[Optional[float], typer.Option("--rmin", help="Smallest radius")] = None,
    rmax: Annotated[Optional[float], typer.Option("--rmax", help="Largest radius")] = None,
    points: Annotated[Optional[int], typer.Option("--points", help="Radii, log-spaced")] = None,
    alpha: AlphaOption = None,
    out: OutOption = None,
    format: FormatOption = None,
    config: ConfigOption = None,
):
    """Log-log slope of |B_r(o)| by closed-form counting."""
    run = Run(config, rmin=rmin, rmax=rmax, points=points, alpha=alpha, out=out, format=format)
    params = run.params(VolumeParams)
    radii = sorted({int(round(r)) for r in np.geomspace(params.rmin, params.rmax, params.points)})
    run.emit(AnalysisService(run.rule).volume_exponent_fit(radii).rows())


@app.command("bound")
@guarded
def bound(
    nmin: Annotated[Optional[float], typer.Option("--nmin", help="Smallest n (e.g. 1e3)")] = None,
    nmax: Annotated[Optional[float], typer.Option("--nmax", help="Largest n (e.g. 1e7)")] = None,
    k: Annotated[Optional[float], typer.Option("--K", help="Orbit-ball constant K")] = None,
    c_path: Annotated[Optional[float], typer.Option("--c-path", help="Path-count constant")] = None,
    c_deep: Annotated[Optional[float], typer.Option("--c-deep", help="Deep-configuration constant")] = None,
    alpha: AlphaOption = None,
    out: OutOption = None,
    format: FormatOption = None,
    config: ConfigOption = None,
):
    """Lower bound on log p_2n(e,e) per decade of n, with the fitted exponent."""
    run = Run(
        config, nmin=nmin, nmax=nmax, K=k, c_path=c_path, c_deep=c_deep, alpha=alpha, out=out, format=format
    )
    params = run.params(BoundParams)
    constants = CountingConstants(K=params.K, c_path=params.c_path, c_deep=params.c_deep)
    with timed("analysis bound"):
        table = AnalysisService(run.rule).bound_pipeline(decades(params.nmin, params.nmax), constants=constants)
    run.emit(table.table_rows())
