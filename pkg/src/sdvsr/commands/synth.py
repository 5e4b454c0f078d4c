"""Synth command."""
from pathlib import Path
from typing import Optional

import typer
from rich import print as rich_print
from rich.panel import Panel

from sdvsr.commands.common import CONFIG_OPTION, DEBUG_OPTION, SET_OPTION, build_config, command_errors, echo_ok
from sdvsr.services.datasets import DatasetService


def synth_command(
    kind: Optional[str] = typer.Option(None, "--kind", help="moving_bars, drifting_checker or noise_pan"),
    frames: Optional[int] = typer.Option(None, "--frames", help="Frames per sequence"),
    size: Optional[int] = typer.Option(None, "--size", help="HR frame side in pixels"),
    velocity: Optional[float] = typer.Option(None, "--velocity", help="Horizontal motion in HR pixels per frame"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of the generated content"),
    count: Optional[int] = typer.Option(None, "--count", help="Number of sequences"),
    scale: Optional[int] = typer.Option(None, "--scale", help="Downscaling factor of the LR frames"),
    sigma: Optional[float] = typer.Option(None, "--sigma", help="Gaussian blur sigma of the degradation"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    config: Optional[Path] = CONFIG_OPTION,
    overrides: Optional[list[str]] = SET_OPTION,
    debug: bool = DEBUG_OPTION,
) -> None:
    """Write a synthetic HR/LR sequence dataset."""
    with command_errors():
        run_config = build_config(
            "synth",
            config,
            overrides,
            debug,
            kind=kind,
            frames=frames,
            size=size,
            velocity=velocity,
            seed=seed,
            count=count,
            scale=scale,
            sigma=sigma,
            out=out,
        )
        result = DatasetService(debug=debug).synth(run_config)

        echo_ok(f"Wrote {len(result.sequences)} sequence(s):")
        for path in result.sequences:
            typer.echo(f"  - {path}")

        rich_print(
            Panel.fit(
                f"Synthetic dataset ready. Manifest: {result.manifest}",
                title="Success",
                border_style="green",
            )
        )
