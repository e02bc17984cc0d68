import logging

from rich.console import Console
from rich.logging import RichHandler

from ..config import settings

_configured = False


def setup_logging(level: str | int | None = None) -> None:
    """Configure the root logger once; logs go to stderr so CSV on stdout stays clean."""
    global _configured
    level = level or ("DEBUG" if settings.DEBUG else settings.LOG_LEVEL)

    root = logging.getLogger()
    root.setLevel(level)
    if _configured:
        return

    handler = RichHandler(
        console=Console(stderr=True),
        show_path=settings.DEBUG,
        rich_tracebacks=True,
    )
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    _configured = True
