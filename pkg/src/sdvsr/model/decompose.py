"""Structure/detail split of a frame."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from sdvsr.errors import DimensionError
from sdvsr.model.config import Decomposition
from sdvsr.tensor.resample import gaussian_blur_array, resize_array
from sdvsr.tensor.tensor4 import Tensor4


def structure_array(frame: np.ndarray, r: int) -> np.ndarray:
    """Bicubic down-then-up of ``frame`` by ``r``, in float64."""
    x = frame.astype(np.float64)
    low = resize_array(x, Fraction(1, r), antialias=True)
    return resize_array(low, r, antialias=True)


def _snap_to_frame_lattice(values: np.ndarray, frame: np.ndarray) -> np.ndarray:
    # each S value becomes a multiple of the frame value's own ulp, which makes
    # frame - S exact in float64 and therefore S + D == frame bit for bit
    step = np.spacing(np.abs(frame)).astype(np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        snapped = np.round(values / step) * step
    # float64 zeros have a subnormal ulp; frame - S is exact there anyway
    return np.where(np.isfinite(snapped), snapped, values)


def decompose(
    frame: Tensor4,
    r: int,
    *,
    method: Decomposition | str = Decomposition.BICUBIC,
    sigma: float = 1.6,
) -> tuple[Tensor4, Tensor4]:
    """Split ``frame`` into structure ``S`` and detail ``D = frame - S``.

    Both components come back in float64. For float32 frames ``S + D``
    reproduces the frame exactly; constant frames give ``D == 0``.
    """
    method = Decomposition(method)
    if frame.h % r != 0 or frame.w % r != 0:
        raise DimensionError(f"decompose needs h, w divisible by {r}, got shape {frame.shape}")
    data = frame.data
    if method is Decomposition.BICUBIC:
        smooth = structure_array(data, r)
    else:
        smooth = gaussian_blur_array(data.astype(np.float64), sigma)
    structure = _snap_to_frame_lattice(smooth, data)
    detail = data.astype(np.float64) - structure
    return Tensor4.wrap(structure), Tensor4.wrap(detail)
