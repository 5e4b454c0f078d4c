"""Shared pieces of the sdvsr commands."""
from __future__ import annotations

from collections.abc import Callable, Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Optional

import typer
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TaskID,
    TextColumn,
    TimeElapsedColumn,
    TimeRemainingColumn,
)

from sdvsr.config import ConfigManager, RunConfig
from sdvsr.console import configure_logging
from sdvsr.errors import SdvsrError

DEBUG_OPTION = typer.Option(False, "--debug", help="Enable debug mode to show all inputs/outputs")
CONFIG_OPTION = typer.Option(None, "--config", help="Flat YAML file of key: value settings")
SET_OPTION = typer.Option(None, "--set", help="Override one setting as key=value (repeatable)")


def echo_ok(message: str) -> None:
    typer.echo(typer.style("✓ ", fg=typer.colors.GREEN) + message)


def echo_warn(message: str) -> None:
    typer.echo(typer.style("! ", fg=typer.colors.YELLOW) + message)


@contextmanager
def command_errors() -> Iterator[None]:
    """Turn library errors into a red message and the matching exit code."""
    try:
        yield
    except typer.Exit:
        raise
    except SdvsrError as exc:
        typer.echo(typer.style("✗ ", fg=typer.colors.RED) + str(exc), err=True)
        raise typer.Exit(exc.exit_code)
    except Exception as exc:
        typer.echo(typer.style("✗ ", fg=typer.colors.RED) + f"Unexpected error: {exc}", err=True)
        raise typer.Exit(1)


def build_config(
    subcommand: str,
    config_path: Optional[Path],
    overrides: Optional[list[str]],
    debug: bool,
    **flags: Any,
) -> RunConfig:
    configure_logging(debug)
    return ConfigManager.build(subcommand, config_path, flags, overrides or ())


def new_progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TextColumn("{task.fields[status]}"),
        TimeElapsedColumn(),
        TimeRemainingColumn(),
        transient=True,
    )


def loss_callback(progress: Progress, task_id: TaskID) -> Callable[[int, int, float], None]:
    def _callback(iteration: int, total: int, loss: float) -> None:
        progress.update(task_id, completed=iteration, total=total, status=f"loss {loss:.5f}")

    return _callback


def item_callback(progress: Progress, task_id: TaskID) -> Callable[[int, int, str], None]:
    def _callback(index: int, total: int, name: str) -> None:
        progress.update(task_id, completed=index, total=total, status=name)

    return _callback
