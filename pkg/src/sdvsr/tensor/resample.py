"""Bicubic resampling and Gaussian blur.

Both are separable linear maps. Weights and accumulation run in float64 and
the result is cast back to the input dtype, so constant images come back
unchanged in float32.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from sdvsr.errors import ArgumentError
from sdvsr.tensor.tensor4 import Tensor4

CUBIC_A = -0.5

Scale = float | Fraction
ScaleArg = Scale | tuple[Scale, Scale]


def cubic(x: np.ndarray | float, a: float = CUBIC_A) -> np.ndarray:
    """Keys cubic convolution kernel."""
    ax = np.abs(np.asarray(x, dtype=np.float64))
    ax2 = ax * ax
    ax3 = ax2 * ax
    near = (a + 2.0) * ax3 - (a + 3.0) * ax2 + 1.0
    far = a * ax3 - 5.0 * a * ax2 + 8.0 * a * ax - 4.0 * a
    return np.where(ax <= 1.0, near, np.where(ax < 2.0, far, 0.0))


def output_length(length: int, scale: Scale) -> int:
    return int(math.floor(length * scale + 0.5))


@lru_cache(maxsize=128)
def resize_matrix(in_len: int, out_len: int, scale: Scale, antialias: bool) -> np.ndarray:
    """Dense (out_len, in_len) float64 interpolation matrix for one axis.

    Output sample ``i`` sits at input coordinate ``(i + 0.5) / scale - 0.5``.
    Taps falling outside the signal are clamped to the border sample and each
    row is normalized to sum to one.
    """
    scale_f = float(scale)
    kernel_scale = scale_f if (antialias and scale_f < 1.0) else 1.0
    support = 2.0 / kernel_scale
    centers = (np.arange(out_len, dtype=np.float64) + 0.5) / scale_f - 0.5
    first = np.floor(centers - support).astype(np.int64)
    taps = int(math.ceil(2.0 * support)) + 2
    index = first[:, None] + np.arange(taps)[None, :]
    weights = cubic((centers[:, None] - index) * kernel_scale) * kernel_scale
    weights /= weights.sum(axis=1, keepdims=True)
    clamped = np.clip(index, 0, in_len - 1)
    matrix = np.zeros((out_len, in_len), dtype=np.float64)
    rows = np.repeat(np.arange(out_len), taps)
    np.add.at(matrix, (rows, clamped.reshape(-1)), weights.reshape(-1))
    matrix.flags.writeable = False
    return matrix


def _split_scale(scale: ScaleArg) -> tuple[Scale, Scale]:
    if isinstance(scale, tuple):
        return scale
    return scale, scale


def resize_matrices(
    shape: tuple[int, ...], scale: ScaleArg, antialias: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """Row and column matrices for resizing an (…, h, w) array."""
    scale_y, scale_x = _split_scale(scale)
    if scale_y <= 0 or scale_x <= 0:
        raise ArgumentError(f"resize scale must be positive, got {scale}")
    h, w = shape[-2], shape[-1]
    out_h, out_w = output_length(h, scale_y), output_length(w, scale_x)
    if out_h <= 0 or out_w <= 0:
        raise ArgumentError(
            f"resize of {h}x{w} by {scale} gives an empty {out_h}x{out_w} output"
        )
    return (
        resize_matrix(h, out_h, scale_y, antialias),
        resize_matrix(w, out_w, scale_x, antialias),
    )


def resize_array(
    x: np.ndarray, scale: ScaleArg, antialias: bool = True
) -> np.ndarray:
    rows, cols = resize_matrices(x.shape, scale, antialias)
    out = rows @ x.astype(np.float64) @ cols.T
    return out.astype(x.dtype)


def resize_array_backward(
    grad_out: np.ndarray, input_shape: tuple[int, ...], scale: ScaleArg, antialias: bool = True
) -> np.ndarray:
    rows, cols = resize_matrices(input_shape, scale, antialias)
    grad = rows.T @ grad_out.astype(np.float64) @ cols
    return grad.astype(grad_out.dtype)


def bicubic_resize(input: Tensor4, scale: ScaleArg, antialias: bool = True) -> Tensor4:
    """Resize ``input`` by ``scale`` (a number or a ``(scale_y, scale_x)`` pair)."""
    return Tensor4.wrap(resize_array(input.data, scale, antialias))


def gaussian_radius(sigma: float) -> int:
    return int(4.0 * sigma + 0.5)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian taps over ``[-radius, radius]``."""
    if not sigma > 0:
        raise ArgumentError(f"gaussian sigma must be positive, got {sigma}")
    radius = gaussian_radius(sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def gaussian_blur_array(x: np.ndarray, sigma: float) -> np.ndarray:
    taps = gaussian_kernel(sigma)
    radius = len(taps) // 2
    h, w = x.shape[2], x.shape[3]
    padded = np.pad(
        x.astype(np.float64),
        ((0, 0), (0, 0), (radius, radius), (radius, radius)),
        mode="reflect",
    )
    vertical = np.zeros(padded.shape[:2] + (h, padded.shape[3]), dtype=np.float64)
    for i, tap in enumerate(taps):
        vertical += tap * padded[:, :, i : i + h, :]
    out = np.zeros(x.shape, dtype=np.float64)
    for j, tap in enumerate(taps):
        out += tap * vertical[:, :, :, j : j + w]
    return out.astype(x.dtype)


def gaussian_blur(input: Tensor4, sigma: float) -> Tensor4:
    """Separable Gaussian blur with reflect padding, channel by channel."""
    return Tensor4.wrap(gaussian_blur_array(input.data, sigma))
