"""Temporal profiles and hidden-state channel dumps."""
from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import numpy as np

from sdvsr.data.frames_io import save_png
from sdvsr.errors import ArgumentError, DimensionError
from sdvsr.model.rsdn import RecurrentState
from sdvsr.tensor.tensor4 import Tensor4


def temporal_profile(frames: Sequence[Tensor4], row: int) -> Tensor4:
    """Stack row ``row`` of each frame: frame ``t`` becomes profile row ``t``."""
    if not frames:
        raise ArgumentError("temporal_profile needs at least one frame")
    shape = frames[0].shape
    if any(frame.shape != shape for frame in frames):
        raise DimensionError("temporal_profile frames differ in shape")
    if not 0 <= row < shape[2]:
        raise ArgumentError(f"profile row {row} outside frame height {shape[2]}")
    rows = np.stack([frame.data[0, :, row, :] for frame in frames], axis=1)
    return Tensor4.wrap(rows[None])


def normalize_channel(channel: np.ndarray) -> np.ndarray:
    """Min-max scale to [0, 1]; a flat channel maps to zeros."""
    lo, hi = float(channel.min()), float(channel.max())
    if hi == lo:
        return np.zeros_like(channel, dtype=np.float64)
    return (channel.astype(np.float64) - lo) / (hi - lo)


def dump_hidden_channels(
    state: RecurrentState | Tensor4, out_dir: str | Path, n: int, prefix: str = "hidden"
) -> list[Path]:
    """Write the first ``n`` hidden channels of batch item 0 as grayscale PNGs."""
    hidden = state.hidden if isinstance(state, RecurrentState) else state
    if not 1 <= n <= hidden.c:
        raise ArgumentError(f"cannot dump {n} channels from a hidden state with {hidden.c}")
    out_dir = Path(out_dir)
    return [
        save_png(out_dir / f"{prefix}_c{index:03d}.png", normalize_channel(hidden.data[0, index]))
        for index in range(n)
    ]
