"""Synthetic moving sequences for desk-scale training and tests."""
from __future__ import annotations

import logging
import math
from enum import Enum
from pathlib import Path

import numpy as np

from sdvsr.data.dataset import MANIFEST_NAME, write_manifest
from sdvsr.data.degrade import DEFAULT_SCALE, DEFAULT_SIGMA, DecimationMode, degrade
from sdvsr.data.frames_io import save_sequence
from sdvsr.data.sequence import SequenceSample
from sdvsr.errors import ArgumentError
from sdvsr.tensor.resample import cubic, gaussian_blur_array
from sdvsr.tensor.tensor4 import Tensor4

logger = logging.getLogger(__name__)


class SynthKind(str, Enum):
    MOVING_BARS = "moving_bars"
    DRIFTING_CHECKER = "drifting_checker"
    NOISE_PAN = "noise_pan"


Velocity = float | tuple[float, float]


def _velocity(velocity: Velocity) -> tuple[float, float]:
    """``(vy, vx)`` in HR pixels per frame; a bare number moves horizontally."""
    if isinstance(velocity, tuple):
        return float(velocity[0]), float(velocity[1])
    return 0.0, float(velocity)


def _moving_bars(rng: np.random.Generator, h: int, w: int) -> np.ndarray:
    colors = np.empty((w, 3))
    x = 0
    while x < w:
        width = int(rng.integers(3, 13))
        colors[x : x + width] = rng.uniform(0.1, 0.9, size=3)
        x += width
    columns = colors.T[:, None, :]
    shade = 0.85 + 0.15 * np.cos(2.0 * np.pi * np.arange(h) / max(h / 2.0, 1.0))
    return columns * shade[None, :, None]


def _drifting_checker(rng: np.random.Generator, h: int, w: int) -> np.ndarray:
    cell = int(rng.integers(4, 9))
    low, high = rng.uniform(0.1, 0.45, size=3), rng.uniform(0.55, 0.9, size=3)
    parity = ((np.arange(h)[:, None] // cell) + (np.arange(w)[None, :] // cell)) % 2
    return np.where(parity[None] == 1, high[:, None, None], low[:, None, None])


def _noise_pan(rng: np.random.Generator, h: int, w: int) -> np.ndarray:
    noise = rng.uniform(0.0, 1.0, size=(1, 3, h, w))
    smooth = gaussian_blur_array(noise, 2.0)[0]
    lo, hi = smooth.min(), smooth.max()
    return 0.05 + 0.9 * (smooth - lo) / max(hi - lo, 1e-12)


MASTERS = {
    SynthKind.MOVING_BARS: _moving_bars,
    SynthKind.DRIFTING_CHECKER: _drifting_checker,
    SynthKind.NOISE_PAN: _noise_pan,
}


def _shift_axis(image: np.ndarray, axis: int, start: float, length: int) -> np.ndarray:
    """Sample ``length`` points from ``start`` along ``axis``.

    Integer starts slice; fractional ones use 4-tap cubic interpolation.
    """
    base = math.floor(start)
    frac = start - base
    if frac == 0.0:
        return np.take(image, np.arange(base, base + length), axis=axis)
    taps = np.arange(-1, 3)
    weights = cubic(taps - frac)
    weights /= weights.sum()
    out = np.zeros(image.shape[:axis] + (length,) + image.shape[axis + 1 :])
    for tap, weight in zip(taps, weights, strict=True):
        out += weight * np.take(image, np.arange(base + tap, base + tap + length), axis=axis)
    return out


def synth_frames(
    kind: SynthKind | str,
    frames: int,
    size: tuple[int, int],
    velocity: Velocity,
    seed: int,
) -> list[Tensor4]:
    """HR frames of a fixed master image translated by ``velocity`` per frame."""
    kind = SynthKind(kind)
    if frames < 1:
        raise ArgumentError(f"frames must be positive, got {frames}")
    h, w = size
    if h < 1 or w < 1:
        raise ArgumentError(f"frame size must be positive, got {size}")
    vy, vx = _velocity(velocity)
    margin_y = math.ceil(abs(vy) * (frames - 1)) + 2
    margin_x = math.ceil(abs(vx) * (frames - 1)) + 2
    rng = np.random.default_rng(seed)
    master = MASTERS[kind](rng, h + 2 * margin_y, w + 2 * margin_x)
    result: list[Tensor4] = []
    for t in range(frames):
        # content moves by +v per frame, so frame t reads the master at -t·v
        rows = _shift_axis(master, 1, margin_y - t * vy, h)
        window = _shift_axis(rows, 2, margin_x - t * vx, w)
        result.append(Tensor4.wrap(np.clip(window, 0.0, 1.0).astype(np.float32)[None]))
    return result


def synth_sequence(
    kind: SynthKind | str,
    frames: int,
    size: tuple[int, int],
    velocity: Velocity = 1.0,
    seed: int = 0,
    *,
    scale: int = DEFAULT_SCALE,
    sigma: float = DEFAULT_SIGMA,
    mode: DecimationMode | str = DecimationMode.STRIDED,
    name: str | None = None,
) -> SequenceSample:
    """A synthetic clip and its degraded LR counterpart; deterministic under ``seed``."""
    hr = synth_frames(kind, frames, size, velocity, seed)
    lr = degrade(hr, sigma, scale, mode)
    return SequenceSample(name or f"{SynthKind(kind).value}_{seed}", tuple(hr), tuple(lr), scale)


def sequence_seeds(seed: int, count: int) -> list[int]:
    rng = np.random.default_rng(seed)
    return [int(s) for s in rng.integers(0, 2**31 - 1, size=count)]


def synth_dataset(
    out_dir: str | Path,
    kind: SynthKind | str,
    count: int,
    frames: int,
    size: tuple[int, int],
    velocity: Velocity = 1.0,
    seed: int = 0,
    *,
    scale: int = DEFAULT_SCALE,
    sigma: float = DEFAULT_SIGMA,
    mode: DecimationMode | str = DecimationMode.STRIDED,
) -> Path:
    """Write ``count`` sequences plus ``manifest.txt`` under ``out_dir``; return the manifest path."""
    if count < 1:
        raise ArgumentError(f"count must be positive, got {count}")
    out_dir = Path(out_dir)
    names: list[str] = []
    for index, child_seed in enumerate(sequence_seeds(seed, count)):
        name = f"seq_{index:04d}"
        sample = synth_sequence(
            kind, frames, size, velocity, child_seed, scale=scale, sigma=sigma, mode=mode, name=name
        )
        save_sequence(sample, out_dir / name)
        names.append(name)
        logger.debug("wrote %s (seed %d)", name, child_seed)
    return write_manifest(out_dir / MANIFEST_NAME, names)
