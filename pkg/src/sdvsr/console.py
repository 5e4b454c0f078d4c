"""Console and logging helpers."""
from __future__ import annotations

import logging
from typing import Any

import yaml
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.syntax import Syntax
from rich.text import Text

LOGGER_NAME = "sdvsr"

console = Console(stderr=True)


def configure_logging(debug: bool = False) -> logging.Logger:
    """Attach a single rich handler to the package logger."""
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(logging.DEBUG if debug else logging.INFO)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(console=console, show_path=False, rich_tracebacks=True)
        handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(handler)
    logger.propagate = False
    return logger


def print_debug(title: str, content: Any, is_yaml: bool = False) -> None:
    """Print debug information in a titled panel.

    Args:
        title: Section title
        content: Content to display
        is_yaml: Render ``content`` as a YAML document
    """
    if is_yaml:
        yaml_str = yaml.safe_dump(content, default_flow_style=False, sort_keys=True)
        body: Any = Syntax(yaml_str, "yaml", theme="monokai", line_numbers=False)
    else:
        body = Text(str(content))
    console.print(Panel(body, title=f"[bold cyan]{title}[/bold cyan]", border_style="cyan"))
    console.print()
