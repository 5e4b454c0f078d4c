"""Train command."""
from pathlib import Path
from typing import Optional

import typer
from rich import print as rich_print
from rich.panel import Panel

from sdvsr.commands.common import (
    CONFIG_OPTION,
    DEBUG_OPTION,
    SET_OPTION,
    build_config,
    command_errors,
    echo_ok,
    loss_callback,
    new_progress,
)
from sdvsr.services.training import TrainingService


def train_command(
    data: Optional[Path] = typer.Option(None, "--data", help="Manifest, sequence directory or folder of sequences"),
    variant: Optional[str] = typer.Option(None, "--variant", help="Block variant: one_stream, two_stream or sd"),
    input_mode: Optional[str] = typer.Option(None, "--input-mode", help="Network input: image or sd"),
    hsa: Optional[str] = typer.Option(None, "--hsa", help="Hidden-state adaptation: on or off"),
    blocks: Optional[int] = typer.Option(None, "--blocks", help="Number of residual blocks"),
    channels: Optional[int] = typer.Option(None, "--channels", help="Feature channels per branch"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Weight of the structure loss"),
    beta: Optional[float] = typer.Option(None, "--beta", help="Weight of the detail loss"),
    gamma: Optional[float] = typer.Option(None, "--gamma", help="Weight of the image loss"),
    epochs: Optional[int] = typer.Option(None, "--epochs", help="Epochs of the step schedule"),
    batch: Optional[int] = typer.Option(None, "--batch", help="Clips per iteration"),
    patch: Optional[int] = typer.Option(None, "--patch", help="HR patch side in pixels"),
    clip_len: Optional[int] = typer.Option(None, "--clip-len", help="Frames per training clip"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of every random draw in the run"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    config: Optional[Path] = CONFIG_OPTION,
    overrides: Optional[list[str]] = SET_OPTION,
    debug: bool = DEBUG_OPTION,
) -> None:
    """Train an RSDN model on a sequence dataset."""
    with command_errors():
        run_config = build_config(
            "train",
            config,
            overrides,
            debug,
            data=data,
            variant=variant,
            input_mode=input_mode,
            hsa=hsa,
            blocks=blocks,
            channels=channels,
            alpha=alpha,
            beta=beta,
            gamma=gamma,
            epochs=epochs,
            batch=batch,
            patch=patch,
            clip_len=clip_len,
            seed=seed,
            out=out,
        )
        progress = new_progress()
        with progress:
            task_id = progress.add_task("Training...", total=None, status="")
            service = TrainingService(debug=debug, progress_callback=loss_callback(progress, task_id))
            result = service.run(run_config)

        echo_ok(f"Trained {result.label} ({result.param_count:,} params) for {result.iterations} iterations.")
        echo_ok(f"Loss {result.initial_loss:.5f} -> {result.final_loss:.5f}")
        if result.val_psnr is not None:
            echo_ok(f"Validation PSNR-Y {result.val_psnr:.2f} dB")
        for path in (result.checkpoint, result.metrics_log, result.snapshot):
            typer.echo(f"  - {path}")

        rich_print(
            Panel.fit(
                f"Training finished. Checkpoint written to {result.checkpoint}.",
                title="Success",
                border_style="green",
            )
        )
