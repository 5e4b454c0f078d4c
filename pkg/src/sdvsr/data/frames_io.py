"""PNG frame directories.

A frame directory holds ``frame_0001.png``, ``frame_0002.png``, ... with no
gaps. A sequence directory holds ``hr/`` and optionally ``lr/`` frame
directories.
"""
from __future__ import annotations

import logging
import re
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from sdvsr.data.degrade import DEFAULT_SCALE, DEFAULT_SIGMA, DecimationMode, degrade
from sdvsr.data.sequence import SequenceSample
from sdvsr.errors import FormatError, SdvsrError
from sdvsr.tensor.tensor4 import Tensor4

logger = logging.getLogger(__name__)

FRAME_PATTERN = re.compile(r"^frame_(\d+)\.png$")
HR_DIR = "hr"
LR_DIR = "lr"


def frame_name(index: int) -> str:
    """File name of the 1-based frame ``index``."""
    return f"frame_{index:04d}.png"


def list_frames(directory: str | Path) -> list[Path]:
    """Numbered PNG frames of ``directory`` in order; gaps are a format error."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FormatError(f"frame directory {directory} does not exist")
    numbered: dict[int, Path] = {}
    for path in directory.iterdir():
        match = FRAME_PATTERN.match(path.name)
        if match:
            numbered[int(match.group(1))] = path
    if not numbered:
        raise FormatError(f"no frame_NNNN.png files in {directory}")
    for expected, index in enumerate(sorted(numbered), start=1):
        if index != expected:
            raise FormatError(
                f"{directory}: expected {frame_name(expected)}, found {numbered[index].name}"
            )
    return [numbered[i] for i in sorted(numbered)]


def to_uint8(array: np.ndarray) -> np.ndarray:
    """[0, 1] floats to bytes with round-half-up and clamping."""
    scaled = np.clip(np.asarray(array, dtype=np.float64) * 255.0, 0.0, 255.0)
    return np.floor(scaled + 0.5).astype(np.uint8)


def load_png(path: str | Path) -> Tensor4:
    """An RGB frame as a (1, 3, h, w) float32 tensor in [0, 1]."""
    path = Path(path)
    try:
        with Image.open(path) as image:
            pixels = np.asarray(image.convert("RGB"), dtype=np.uint8)
    except (OSError, UnidentifiedImageError) as exc:
        raise FormatError(f"cannot read frame {path}: {exc}") from exc
    data = pixels.astype(np.float32) / np.float32(255.0)
    return Tensor4.wrap(np.ascontiguousarray(data.transpose(2, 0, 1)[None]))


def save_png(path: str | Path, image: Tensor4 | np.ndarray) -> Path:
    """Write a (1, 3, h, w) tensor as RGB or a (h, w) array as grayscale."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = image.data if isinstance(image, Tensor4) else np.asarray(image)
    if data.ndim == 2:
        Image.fromarray(to_uint8(data)).save(path)
        return path
    if data.ndim != 4 or data.shape[:2] != (1, 3):
        raise FormatError(f"cannot save array of shape {data.shape} as a frame")
    Image.fromarray(np.ascontiguousarray(to_uint8(data[0].transpose(1, 2, 0)))).save(path)
    return path


def load_frames(directory: str | Path) -> list[Tensor4]:
    frames: list[Tensor4] = []
    for path in list_frames(directory):
        frame = load_png(path)
        if frames and frame.shape != frames[0].shape:
            raise FormatError(
                f"{path}: size {frame.h}x{frame.w} differs from {frames[0].h}x{frames[0].w}"
            )
        frames.append(frame)
    return frames


def save_frames(frames: Sequence[Tensor4], directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return [save_png(directory / frame_name(i), frame) for i, frame in enumerate(frames, start=1)]


def load_sequence(
    directory: str | Path,
    scale: int = DEFAULT_SCALE,
    sigma: float = DEFAULT_SIGMA,
    mode: DecimationMode | str = DecimationMode.STRIDED,
) -> SequenceSample:
    """Load ``hr/`` and ``lr/``; a missing ``lr/`` is derived with :func:`degrade`."""
    directory = Path(directory)
    hr_frames = load_frames(directory / HR_DIR)
    lr_dir = directory / LR_DIR
    if lr_dir.is_dir():
        lr_frames = load_frames(lr_dir)
    else:
        logger.debug("%s has no %s/; degrading HR frames", directory, LR_DIR)
        lr_frames = degrade(hr_frames, sigma, scale, mode)
    try:
        return SequenceSample(directory.name, tuple(hr_frames), tuple(lr_frames), scale)
    except SdvsrError as exc:
        raise FormatError(f"{directory}: {exc}") from exc


def save_sequence(sample: SequenceSample, directory: str | Path) -> Path:
    directory = Path(directory)
    save_frames(sample.hr_frames, directory / HR_DIR)
    save_frames(sample.lr_frames, directory / LR_DIR)
    return directory
