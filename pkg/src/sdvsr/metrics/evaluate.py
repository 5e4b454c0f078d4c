"""Evaluation reports over sequence datasets."""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from collections.abc import Callable, Iterable
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from rich.table import Table

from sdvsr.data.dataset import SequenceDataset
from sdvsr.errors import ArgumentError, UsageError
from sdvsr.metrics.quality import psnr, rgb_to_y, ssim
from sdvsr.model.rsdn import RSDN
from sdvsr.tensor.resample import bicubic_resize
from sdvsr.tensor.tensor4 import Tensor4

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("sequence", "frame", "psnr_y", "ssim_y", "psnr_rgb", "ssim_rgb", "ms_per_frame")
DEFAULT_BORDER_CROP = 8

ProgressCallback = Callable[[int, int, str], None]


@dataclass(frozen=True)
class FrameMetrics:
    sequence: str
    frame: int
    psnr_y: float
    ssim_y: float
    psnr_rgb: float
    ssim_rgb: float
    ms_per_frame: float | None = None


@dataclass(frozen=True)
class SequenceMetrics:
    name: str
    frames: int
    psnr_y: float
    ssim_y: float
    psnr_rgb: float
    ssim_rgb: float


def _mean(values: Iterable[float]) -> float:
    return float(np.mean(list(values)))


def _aggregate(name: str, rows: list[FrameMetrics] | list[SequenceMetrics]) -> SequenceMetrics:
    frames = sum(getattr(r, "frames", 1) for r in rows)
    return SequenceMetrics(
        name=name,
        frames=frames,
        psnr_y=_mean(r.psnr_y for r in rows),
        ssim_y=_mean(r.ssim_y for r in rows),
        psnr_rgb=_mean(r.psnr_rgb for r in rows),
        ssim_rgb=_mean(r.ssim_rgb for r in rows),
    )


@dataclass(frozen=True)
class EvalReport:
    """Per-frame metrics; sequence values are frame means, the overall value is the mean over sequences."""

    model_id: str
    param_count: int
    frames: tuple[FrameMetrics, ...]
    border_crop: int = DEFAULT_BORDER_CROP

    def sequences(self) -> list[SequenceMetrics]:
        grouped: dict[str, list[FrameMetrics]] = {}
        for row in self.frames:
            grouped.setdefault(row.sequence, []).append(row)
        return [_aggregate(name, rows) for name, rows in grouped.items()]

    def mean(self) -> SequenceMetrics:
        sequences = self.sequences()
        if not sequences:
            raise UsageError("empty evaluation report")
        return _aggregate("average", sequences)

    def csv_text(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.frames:
            writer.writerow(
                [
                    row.sequence,
                    row.frame,
                    _fmt(row.psnr_y),
                    _fmt(row.ssim_y),
                    _fmt(row.psnr_rgb),
                    _fmt(row.ssim_rgb),
                    "" if row.ms_per_frame is None else f"{row.ms_per_frame:.3f}",
                ]
            )
        return buffer.getvalue()

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.csv_text(), encoding="utf-8")
        return path


def _fmt(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.6f}"


def crop_border(x: np.ndarray, border: int) -> np.ndarray:
    if border < 0:
        raise ArgumentError(f"border crop must be >= 0, got {border}")
    h, w = x.shape[-2:]
    if 2 * border >= min(h, w):
        raise ArgumentError(f"border crop {border} leaves nothing of a {h}x{w} frame")
    if border == 0:
        return x
    return x[..., border : h - border, border : w - border]


def frame_metrics(
    prediction: Tensor4, truth: Tensor4, border_crop: int, sequence: str, frame: int
) -> FrameMetrics:
    """Clip ``prediction`` to [0, 1], crop borders, and score Y and RGB."""
    pred = Tensor4.wrap(crop_border(np.clip(prediction.data.astype(np.float64), 0.0, 1.0), border_crop))
    ref = Tensor4.wrap(crop_border(truth.data.astype(np.float64), border_crop))
    pred_y, ref_y = rgb_to_y(pred), rgb_to_y(ref)
    return FrameMetrics(
        sequence=sequence,
        frame=frame,
        psnr_y=psnr(pred_y, ref_y),
        ssim_y=ssim(pred_y, ref_y),
        psnr_rgb=psnr(pred, ref),
        ssim_rgb=ssim(pred, ref),
    )


def evaluate(
    model: RSDN,
    dataset: SequenceDataset,
    border_crop: int = DEFAULT_BORDER_CROP,
    *,
    timing: bool = False,
    model_id: str = "rsdn",
    progress_callback: ProgressCallback | None = None,
) -> EvalReport:
    """Super-resolve every clip and score each frame against its HR ground truth."""
    if len(dataset) == 0:
        raise UsageError("cannot evaluate on an empty dataset")
    rows: list[FrameMetrics] = []
    for index, sample in enumerate(dataset):
        if progress_callback:
            progress_callback(index, len(dataset), sample.name)
        started = time.perf_counter()
        outputs = model.forward_sequence(list(sample.lr_frames))
        ms = (time.perf_counter() - started) * 1000.0 / len(outputs) if timing else None
        for t, (output, truth) in enumerate(zip(outputs, sample.hr_frames, strict=True), start=1):
            row = frame_metrics(output.i_hr, truth, border_crop, sample.name, t)
            if ms is not None:
                row = replace(row, ms_per_frame=ms)
            rows.append(row)
        logger.debug("evaluated %s (%d frames)", sample.name, len(outputs))
    if progress_callback:
        progress_callback(len(dataset), len(dataset), "done")
    return EvalReport(model_id, model.param_count, tuple(rows), border_crop)


def bicubic_baseline(dataset: SequenceDataset, border_crop: int = DEFAULT_BORDER_CROP) -> EvalReport:
    """Scores of plain bicubic upsampling of the LR frames."""
    if len(dataset) == 0:
        raise UsageError("cannot evaluate on an empty dataset")
    rows: list[FrameMetrics] = []
    for sample in dataset:
        for t, (lr, hr) in enumerate(zip(sample.lr_frames, sample.hr_frames, strict=True), start=1):
            upsampled = bicubic_resize(lr, sample.scale)
            rows.append(frame_metrics(upsampled, hr, border_crop, sample.name, t))
    return EvalReport("bicubic", 0, tuple(rows), border_crop)


def render_table(report: EvalReport, title: str | None = None) -> Table:
    table = Table(title=title or f"{report.model_id} ({report.param_count:,} params)")
    table.add_column("Sequence", style="cyan")
    table.add_column("Frames", justify="right")
    for column in ("PSNR-Y", "SSIM-Y", "PSNR-RGB", "SSIM-RGB"):
        table.add_column(column, justify="right")
    rows = report.sequences()
    for row in [*rows, report.mean()]:
        style = "bold" if row.name == "average" else None
        table.add_row(
            row.name,
            str(row.frames),
            f"{row.psnr_y:.2f}",
            f"{row.ssim_y:.4f}",
            f"{row.psnr_rgb:.2f}",
            f"{row.ssim_rgb:.4f}",
            style=style,
        )
    return table
