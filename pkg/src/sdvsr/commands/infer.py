"""Infer command."""
from pathlib import Path
from typing import Optional

import typer
from rich import print as rich_print
from rich.panel import Panel

from sdvsr.commands.common import CONFIG_OPTION, DEBUG_OPTION, SET_OPTION, build_config, command_errors, echo_ok
from sdvsr.services.inference import InferenceService


def infer_command(
    ckpt: Optional[Path] = typer.Option(None, "--ckpt", help="Checkpoint file"),
    in_dir: Optional[Path] = typer.Option(None, "--in-dir", help="Directory of LR frame_NNNN.png files"),
    out_dir: Optional[Path] = typer.Option(None, "--out-dir", help="Directory for the super-resolved frames"),
    dump_hidden: Optional[int] = typer.Option(None, "--dump-hidden", help="Hidden channels to dump per frame"),
    profile_row: Optional[int] = typer.Option(None, "--profile-row", help="HR row for a temporal profile image"),
    config: Optional[Path] = CONFIG_OPTION,
    overrides: Optional[list[str]] = SET_OPTION,
    debug: bool = DEBUG_OPTION,
) -> None:
    """Super-resolve a PNG frame sequence with a trained checkpoint."""
    with command_errors():
        run_config = build_config(
            "infer",
            config,
            overrides,
            debug,
            ckpt=ckpt,
            in_dir=in_dir,
            out_dir=out_dir,
            dump_hidden=dump_hidden,
            profile_row=profile_row,
        )
        result = InferenceService(debug=debug).infer(run_config)

        echo_ok(f"Wrote {len(result.frames)} frame(s) to {run_config.out_dir}")
        if result.hidden_maps:
            echo_ok(f"Dumped {len(result.hidden_maps)} hidden-state map(s)")
        if result.profile is not None:
            echo_ok(f"Temporal profile written to {result.profile}")

        rich_print(
            Panel.fit(
                "Inference finished.",
                title="Success",
                border_style="green",
            )
        )
