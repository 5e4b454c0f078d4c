"""Dataset materialization behind ``sdvsr synth`` and ``sdvsr degrade``."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import TypeVar

from sdvsr.config import ConfigManager, RunConfig, degrade_mode_from, require
from sdvsr.console import print_debug
from sdvsr.data.dataset import read_manifest
from sdvsr.data.degrade import DecimationMode, degrade
from sdvsr.data.frames_io import HR_DIR, load_frames, save_frames
from sdvsr.data.synth import SynthKind, synth_dataset
from sdvsr.errors import UsageError

logger = logging.getLogger(__name__)

E = TypeVar("E", bound=Enum)


def _choice(enum: type[E], value: object, flag: str) -> E:
    try:
        return enum(str(value))
    except ValueError as exc:
        choices = "|".join(str(member.value) for member in enum)
        raise UsageError(f"{flag} must be one of {choices}, got {value!r}") from exc


@dataclass(frozen=True)
class SynthResult:
    """Result of writing a synthetic dataset."""

    manifest: Path
    sequences: list[Path]
    snapshot: Path


@dataclass(frozen=True)
class DegradeResult:
    """Result of degrading one HR frame directory."""

    frames: list[Path]
    hr_size: tuple[int, int]
    lr_size: tuple[int, int]
    snapshot: Path


class DatasetService:
    """Service for writing synthetic and degraded frame sequences."""

    def __init__(self, debug: bool = False) -> None:
        self._debug = debug

    def synth(self, config: RunConfig) -> SynthResult:
        """Write ``count`` synthetic sequences and a manifest under ``out``."""
        values = config.values
        require(values, "out")
        kind = _choice(SynthKind, values["kind"], "--kind")
        mode = degrade_mode_from(values)
        out_dir = Path(values["out"])
        snapshot = ConfigManager.write_snapshot(values, out_dir)
        if self._debug:
            print_debug("Synthetic dataset", values, is_yaml=True)
        size = int(values["size"])
        manifest = synth_dataset(
            out_dir,
            kind,
            int(values["count"]),
            int(values["frames"]),
            (size, size),
            float(values["velocity"]),
            int(values["seed"]),
            scale=int(values["scale"]),
            sigma=float(values["sigma"]),
            mode=mode,
        )
        logger.info("wrote manifest %s", manifest)
        return SynthResult(manifest=manifest, sequences=read_manifest(manifest), snapshot=snapshot)

    def degrade(self, config: RunConfig) -> DegradeResult:
        """Blur and decimate the HR frames of ``in_dir`` into ``out_dir``.

        ``in_dir`` is either a numbered frame directory or a sequence
        directory with an ``hr/`` sub-directory.
        """
        values = config.values
        require(values, "in_dir", "out_dir")
        mode = _choice(DecimationMode, values["mode"], "--mode")
        in_dir = Path(values["in_dir"])
        if (in_dir / HR_DIR).is_dir():
            in_dir = in_dir / HR_DIR
        out_dir = Path(values["out_dir"])

        hr_frames = load_frames(in_dir)
        lr_frames = degrade(hr_frames, float(values["sigma"]), int(values["scale"]), mode)
        snapshot = ConfigManager.write_snapshot(values, out_dir)
        written = save_frames(lr_frames, out_dir)
        return DegradeResult(
            frames=written,
            hr_size=(hr_frames[0].h, hr_frames[0].w),
            lr_size=(lr_frames[0].h, lr_frames[0].w),
            snapshot=snapshot,
        )
