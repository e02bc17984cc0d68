import typer
from typing import Annotated

from . import __version__
from .cli import analysis, graph, group, orbit, wreath, zline
from .config import settings
from .core.logging import setup_logging

app = typer.Typer(
    name="bubblewalk",
    help="Random walks on bubble graphs, bubble groups and their lamplighters.",
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)

# Include sub-applications
app.add_typer(graph.app, name="graph")
app.add_typer(zline.app, name="zline")
app.add_typer(orbit.app, name="orbit")
app.add_typer(group.app, name="group")
app.add_typer(wreath.app, name="wreath")
app.add_typer(analysis.app, name="analysis")


def _version(value: bool) -> None:
    if value:
        typer.echo(f"{settings.PROJECT_NAME} {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    verbose: Annotated[int, typer.Option("--verbose", "-v", count=True, help="-v info, -vv debug")] = 0,
    version: Annotated[
        bool, typer.Option("--version", callback=_version, is_eager=True, help="Show the version and exit")
    ] = False,
):
    """Configure logging before any command runs."""
    setup_logging({0: None, 1: "INFO"}.get(verbose, "DEBUG"))


def run() -> None:
    app()
