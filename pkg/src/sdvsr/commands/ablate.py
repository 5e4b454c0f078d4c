"""Ablate command."""
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
    echo_warn,
    item_callback,
    new_progress,
)
from sdvsr.services.ablation import AblationService, render_ablation


def ablate_command(
    grid: Optional[str] = typer.Option(None, "--grid", help="table1 (architectures) or table2 (loss weights)"),
    data: Optional[Path] = typer.Option(None, "--data", help="Manifest, sequence directory or folder of sequences"),
    budget_iters: Optional[int] = typer.Option(None, "--budget-iters", help="Training iterations per case and seed"),
    seeds: Optional[int] = typer.Option(None, "--seeds", help="Seeds averaged per case"),
    blocks: Optional[int] = typer.Option(None, "--blocks", help="Number of residual blocks"),
    channels: Optional[int] = typer.Option(None, "--channels", help="Base feature channels"),
    batch: Optional[int] = typer.Option(None, "--batch", help="Clips per iteration"),
    patch: Optional[int] = typer.Option(None, "--patch", help="HR patch side in pixels"),
    clip_len: Optional[int] = typer.Option(None, "--clip-len", help="Frames per training clip"),
    seed: Optional[int] = typer.Option(None, "--seed", help="First seed of the seed set"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    config: Optional[Path] = CONFIG_OPTION,
    overrides: Optional[list[str]] = SET_OPTION,
    debug: bool = DEBUG_OPTION,
) -> None:
    """Train every configuration of an ablation grid and rank them."""
    with command_errors():
        run_config = build_config(
            "ablate",
            config,
            overrides,
            debug,
            grid=grid,
            data=data,
            budget_iters=budget_iters,
            seeds=seeds,
            blocks=blocks,
            channels=channels,
            batch=batch,
            patch=patch,
            clip_len=clip_len,
            seed=seed,
            out=out,
        )
        progress = new_progress()
        with progress:
            task_id = progress.add_task("Running ablation...", total=None, status="")
            service = AblationService(debug=debug, progress_callback=item_callback(progress, task_id))
            result = service.run(run_config)

        rich_print(render_ablation(result))
        for check in result.checks:
            if check.holds:
                echo_ok(check.description)
            else:
                echo_warn(f"not met: {check.description}")
        echo_ok(f"Comparison written to {result.csv_path}")

        summary = "All ordering checks hold." if result.ordering_ok else "Some ordering checks failed; see above."
        rich_print(
            Panel.fit(
                f"Ablation {result.grid.value} finished with {len(result.rows)} case(s).\n{summary}",
                title="Success",
                border_style="green" if result.ordering_ok else "yellow",
            )
        )
