"""Eval command."""
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
    item_callback,
    new_progress,
)
from sdvsr.metrics.evaluate import render_table
from sdvsr.services.inference import InferenceService


def eval_command(
    ckpt: Optional[Path] = typer.Option(None, "--ckpt", help="Checkpoint file"),
    data: Optional[Path] = typer.Option(None, "--data", help="Manifest, sequence directory or folder of sequences"),
    crop: Optional[int] = typer.Option(None, "--crop", help="Border pixels ignored by the metrics"),
    report: Optional[Path] = typer.Option(None, "--report", help="CSV report path (default <out>/report.csv)"),
    timing: Optional[bool] = typer.Option(None, "--timing/--no-timing", help="Record wall-clock ms per frame"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    config: Optional[Path] = CONFIG_OPTION,
    overrides: Optional[list[str]] = SET_OPTION,
    debug: bool = DEBUG_OPTION,
) -> None:
    """Score a checkpoint with PSNR and SSIM on Y and RGB."""
    with command_errors():
        run_config = build_config(
            "eval",
            config,
            overrides,
            debug,
            ckpt=ckpt,
            data=data,
            crop=crop,
            report=report,
            timing=timing,
            out=out,
        )
        progress = new_progress()
        with progress:
            task_id = progress.add_task("Evaluating...", total=None, status="")
            service = InferenceService(debug=debug, progress_callback=item_callback(progress, task_id))
            result = service.evaluate(run_config)

        rich_print(render_table(result.report))
        mean = result.report.mean()
        echo_ok(f"Average PSNR-Y {mean.psnr_y:.2f} dB, SSIM-Y {mean.ssim_y:.4f}")
        echo_ok(f"Report written to {result.report_path}")

        rich_print(
            Panel.fit(
                f"Evaluated {len(result.report.frames)} frame(s).",
                title="Success",
                border_style="green",
            )
        )
