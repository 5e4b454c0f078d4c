"""Blur-and-decimate degradation from HR to LR frames."""
from __future__ import annotations

from collections.abc import Sequence
from enum import Enum
from fractions import Fraction

import numpy as np

from sdvsr.errors import ArgumentError, DimensionError
from sdvsr.tensor.resample import gaussian_blur_array, resize_array
from sdvsr.tensor.tensor4 import Tensor4

DEFAULT_SIGMA = 1.6
DEFAULT_SCALE = 4


class DecimationMode(str, Enum):
    STRIDED = "strided"
    BICUBIC = "bicubic"


def degrade_frame(
    frame: Tensor4,
    sigma: float = DEFAULT_SIGMA,
    r: int = DEFAULT_SCALE,
    mode: DecimationMode | str = DecimationMode.STRIDED,
) -> Tensor4:
    """Gaussian blur, then keep every ``r``-th pixel from the top-left one.

    ``mode="bicubic"`` replaces the subsampling with a bicubic ×1/r resize,
    clipped back to [0, 1].
    """
    mode = DecimationMode(mode)
    if r < 1:
        raise ArgumentError(f"scale must be positive, got {r}")
    if frame.h % r != 0 or frame.w % r != 0:
        raise DimensionError(f"degrade needs h, w divisible by {r}, got shape {frame.shape}")
    blurred = gaussian_blur_array(frame.data, sigma)
    if mode is DecimationMode.STRIDED:
        low = np.ascontiguousarray(blurred[:, :, ::r, ::r])
    else:
        low = np.clip(resize_array(blurred, Fraction(1, r), antialias=True), 0.0, 1.0)
    return Tensor4.wrap(low)


def degrade(
    hr_frames: Sequence[Tensor4],
    sigma: float = DEFAULT_SIGMA,
    r: int = DEFAULT_SCALE,
    mode: DecimationMode | str = DecimationMode.STRIDED,
) -> list[Tensor4]:
    return [degrade_frame(frame, sigma, r, mode) for frame in hr_frames]
