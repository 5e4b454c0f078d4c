"""Inference and evaluation services behind ``sdvsr infer`` and ``sdvsr eval``."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sdvsr.config import ConfigManager, RunConfig, degrade_mode_from, require
from sdvsr.console import print_debug
from sdvsr.data.dataset import SequenceDataset
from sdvsr.data.frames_io import load_frames, save_frames, save_png
from sdvsr.metrics.evaluate import DEFAULT_BORDER_CROP, EvalReport, ProgressCallback, evaluate
from sdvsr.metrics.visualize import dump_hidden_channels, temporal_profile
from sdvsr.tensor.tensor4 import Tensor4
from sdvsr.training.checkpoint import load_checkpoint

logger = logging.getLogger(__name__)

HIDDEN_DIR = "hidden"
PROFILE_NAME = "profile_row{row:04d}.png"
REPORT_NAME = "report.csv"


@dataclass(frozen=True)
class InferenceResult:
    """Result of super-resolving one frame directory."""

    frames: list[Path]
    hidden_maps: list[Path]
    profile: Path | None
    snapshot: Path


@dataclass(frozen=True)
class EvaluationResult:
    """Result of evaluating a checkpoint."""

    report: EvalReport
    report_path: Path
    snapshot: Path


def evaluate_checkpoint(
    path: str | Path,
    dataset: SequenceDataset,
    border_crop: int = DEFAULT_BORDER_CROP,
    *,
    timing: bool = False,
    progress_callback: ProgressCallback | None = None,
) -> EvalReport:
    """Load the checkpoint at ``path`` and evaluate it on ``dataset``."""
    checkpoint = load_checkpoint(path)
    return evaluate(
        checkpoint.model,
        dataset,
        border_crop,
        timing=timing,
        model_id=Path(path).name,
        progress_callback=progress_callback,
    )


class InferenceService:
    """Service for running trained checkpoints."""

    def __init__(self, debug: bool = False, progress_callback: ProgressCallback | None = None) -> None:
        self._debug = debug
        self._progress_callback = progress_callback

    def infer(self, config: RunConfig) -> InferenceResult:
        """
        Super-resolve the numbered PNG frames of ``in_dir`` into ``out_dir``.

        Hidden states are dumped per time step under ``out_dir/hidden`` when
        ``dump_hidden`` is positive; ``profile_row`` adds a temporal profile
        of the reconstructed frames.
        """
        values = config.values
        require(values, "ckpt", "in_dir", "out_dir")
        out_dir = Path(values["out_dir"])
        snapshot = ConfigManager.write_snapshot(values, out_dir)

        checkpoint = load_checkpoint(values["ckpt"])
        model = checkpoint.model
        if self._debug:
            print_debug("Checkpoint", {"step": checkpoint.step, "model": model.config.to_dict()}, is_yaml=True)

        lr_frames = [frame.astype(model.dtype) for frame in load_frames(values["in_dir"])]
        outputs = model.forward_sequence(lr_frames)
        hr_frames = [Tensor4.wrap(np.clip(out.i_hr.data, 0.0, 1.0)) for out in outputs]
        written = save_frames(hr_frames, out_dir)
        logger.info("wrote %d frames to %s", len(written), out_dir)

        hidden_maps: list[Path] = []
        dump_hidden = int(values.get("dump_hidden") or 0)
        if dump_hidden > 0:
            for t, out in enumerate(outputs, start=1):
                hidden_maps += dump_hidden_channels(
                    out.new_state, out_dir / HIDDEN_DIR, dump_hidden, prefix=f"t{t:04d}"
                )

        profile = None
        row = values.get("profile_row")
        if row is not None:
            image = temporal_profile(hr_frames, int(row))
            profile = save_png(out_dir / PROFILE_NAME.format(row=int(row)), image)

        return InferenceResult(frames=written, hidden_maps=hidden_maps, profile=profile, snapshot=snapshot)

    def evaluate(self, config: RunConfig) -> EvaluationResult:
        """Score ``ckpt`` on ``data`` and write the per-frame CSV report."""
        values = config.values
        require(values, "ckpt", "data")
        out_dir = Path(values["out"])
        report_path = Path(values["report"]) if values.get("report") else out_dir / REPORT_NAME
        snapshot = ConfigManager.write_snapshot(values, out_dir)

        checkpoint = load_checkpoint(values["ckpt"])
        dataset = SequenceDataset.from_path(
            values["data"], checkpoint.model.config.scale, float(values["sigma"]), degrade_mode_from(values)
        )
        if self._debug:
            print_debug("Evaluation", {"sequences": dataset.names, "crop": int(values["crop"])}, is_yaml=True)
        report = evaluate(
            checkpoint.model,
            dataset,
            int(values["crop"]),
            timing=bool(values["timing"]),
            model_id=Path(values["ckpt"]).name,
            progress_callback=self._progress_callback,
        )
        report.to_csv(report_path)
        return EvaluationResult(report=report, report_path=report_path, snapshot=snapshot)
