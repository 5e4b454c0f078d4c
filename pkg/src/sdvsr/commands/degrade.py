"""Degrade command."""
from pathlib import Path
from typing import Optional

import typer
from rich import print as rich_print
from rich.panel import Panel

from sdvsr.commands.common import CONFIG_OPTION, DEBUG_OPTION, SET_OPTION, build_config, command_errors, echo_ok
from sdvsr.services.datasets import DatasetService


def degrade_command(
    in_dir: Optional[Path] = typer.Option(None, "--in-dir", help="HR frame directory or sequence directory"),
    out_dir: Optional[Path] = typer.Option(None, "--out-dir", help="Directory for the LR frames"),
    sigma: Optional[float] = typer.Option(None, "--sigma", help="Gaussian blur sigma"),
    scale: Optional[int] = typer.Option(None, "--scale", help="Downscaling factor"),
    mode: Optional[str] = typer.Option(None, "--mode", help="Decimation: strided or bicubic"),
    config: Optional[Path] = CONFIG_OPTION,
    overrides: Optional[list[str]] = SET_OPTION,
    debug: bool = DEBUG_OPTION,
) -> None:
    """Produce LR counterparts of an HR frame sequence."""
    with command_errors():
        run_config = build_config(
            "degrade",
            config,
            overrides,
            debug,
            in_dir=in_dir,
            out_dir=out_dir,
            sigma=sigma,
            scale=scale,
            mode=mode,
        )
        result = DatasetService(debug=debug).degrade(run_config)

        hr_h, hr_w = result.hr_size
        lr_h, lr_w = result.lr_size
        echo_ok(f"Degraded {len(result.frames)} frame(s) from {hr_h}x{hr_w} to {lr_h}x{lr_w}")

        rich_print(
            Panel.fit(
                f"LR frames written to {run_config.out_dir}.",
                title="Success",
                border_style="green",
            )
        )
