import typer
from typing import Annotated, Optional

from ..core.error_handling import guarded
from ..models.vertex import VertexAddress
from ..schemas.experiment import BallParams, DistParams
from ..schemas.graph import BallRow
from ..services.graph_service import GraphService
from .common import AlphaOption, ConfigOption, FormatOption, OutOption, Run, timed

app = typer.Typer(help="Vertices, balls and distances of S(alpha).", no_args_is_help=True)


@app.command("ball")
@guarded
def ball(
    radius: Annotated[Optional[int], typer.Option("--radius", "-r", help="Ball radius")] = None,
    center: Annotated[Optional[str], typer.Option("--center", help="Centre as path:pos")] = None,
    alpha: AlphaOption = None,
    out: OutOption = None,
    format: FormatOption = None,
    config: ConfigOption = None,
):
    """List B_r(center) as rows (path, pos, dist_to_root)."""
    run = Run(config, radius=radius, center=center, alpha=alpha, out=out, format=format)
    params = run.params(BallParams)
    service = GraphService(run.rule)
    with timed("graph ball"):
        vertices = sorted(service.ball(VertexAddress.parse(params.center), params.radius))
    run.emit([BallRow(path=x.path_bits, pos=x.pos, dist_to_root=service.dist_to_root(x)) for x in vertices])


@app.command("dist")
@guarded
def dist(
    source: Annotated[Optional[str], typer.Option("--from", help="Start vertex as path:pos")] = None,
    target: Annotated[Optional[str], typer.Option("--to", help="End vertex as path:pos")] = None,
    cap: Annotated[Optional[int], typer.Option("--cap", help="Search by BFS up to this depth")] = None,
    alpha: AlphaOption = None,
    out: OutOption = None,
    format: FormatOption = None,
    config: ConfigOption = None,
):
    """Graph distance between two vertices; prints 'none' when a BFS cap is exceeded."""
    run = Run(config, source=source, target=target, cap=cap, alpha=alpha, out=out, format=format)
    params = run.params(DistParams)
    service = GraphService(run.rule)
    x, y = VertexAddress.parse(params.source), VertexAddress.parse(params.target)
    if params.cap is None:
        value = service.geodesic_distance(x, y)
    else:
        value = service.dist(x, y, params.cap)
    if value is None:
        typer.echo("none")
        return
    run.echo("graph.dist", "dist", value, source=params.source, target=params.target)
