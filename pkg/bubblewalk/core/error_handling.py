import functools
import logging
from typing import Any, Callable, Sequence, TypeVar

import click
import typer
from pydantic import ValidationError
from rich.console import Console

from ..config import settings
from ..core.exception import BubblewalkException
from ..schemas.result import Error, ErrorCategory

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


class ExceptionHandler:
    """
    Centralized exception handling for CLI commands.
    Turns every failure into a diagnostic on stderr and a stable exit code.
    """

    def __init__(self, log_internal_errors: bool = True, console: Console | None = None):
        self.log_internal_errors = log_internal_errors
        self.console = console or Console(stderr=True)
        self._register_handlers()

    def _register_handlers(self):
        """Register exception type to handler method mappings"""
        self.EXCEPTION_HANDLERS = {
            BubblewalkException: self._handle_bubblewalk_exception,
            ValidationError: self._handle_validation_error,
            click.exceptions.BadParameter: self._handle_usage_error,
        }

    def handle(self, ex: Exception) -> Error:
        """Route exception to the appropriate handler and report it."""
        for exc_type, handler in self.EXCEPTION_HANDLERS.items():
            if isinstance(ex, exc_type):
                error = handler(ex)
                break
        else:
            error = self._handle_unhandled_exception(ex)

        self.console.print(f"[bold red]error[/bold red] ({error.category}): {error.message}")
        return error

    def _handle_bubblewalk_exception(self, ex: BubblewalkException) -> Error:
        return Error(message=ex.message, exit_code=ex.exit_code, category=ex.category)

    def _handle_validation_error(self, ex: ValidationError) -> Error:
        """Handle pydantic validation errors"""
        return Error(
            message=self._format_validation_error(ex.errors()),
            exit_code=2,
            category=ErrorCategory.VALIDATION,
        )

    def _handle_usage_error(self, ex: click.exceptions.BadParameter) -> Error:
        return Error(message=ex.format_message(), exit_code=2, category=ErrorCategory.VALIDATION)

    def _handle_unhandled_exception(self, ex: Exception) -> Error:
        """Handle unexpected exceptions"""
        if self.log_internal_errors:
            logger.error("Unhandled exception", exc_info=ex)

        return Error(
            message=f"An unexpected error occurred: {type(ex).__name__}",
            exit_code=1,
            category=ErrorCategory.INTERNAL,
        )

    def _format_validation_error(self, errors: Sequence[Any]) -> str:
        """Format validation errors into human-readable message"""
        messages = []
        for error in errors:
            loc = " -> ".join(str(loc) for loc in error.get("loc", []))
            msg = error.get("msg", "Unknown error")
            error_type = error.get("type", "unknown")

            messages.append(f"Error in {loc}: {msg} (type: {error_type})")

        return "; ".join(messages) if messages else "Validation failed"


def guarded(command: F) -> F:
    """Run a CLI command under the exception handler; failures exit nonzero."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (typer.Exit, typer.Abort, click.exceptions.UsageError):
            raise
        except Exception as ex:
            error = ExceptionHandler(log_internal_errors=settings.DEBUG).handle(ex)
            raise typer.Exit(code=error.exit_code)

    return wrapper  # type: ignore[return-value]
