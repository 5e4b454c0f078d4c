"""PSNR and SSIM on RGB or BT.601 luma."""
from __future__ import annotations

import math

import numpy as np

from sdvsr.errors import ArgumentError, DimensionError, describe_shapes
from sdvsr.tensor.tensor4 import Tensor4

BT601 = np.array([65.481, 128.553, 24.966])


def _array(x: Tensor4 | np.ndarray) -> np.ndarray:
    return np.asarray(x.data if isinstance(x, Tensor4) else x, dtype=np.float64)


def rgb_to_y(img: Tensor4) -> Tensor4:
    """BT.601 luma in [16/255, 235/255] of a [0, 1] RGB tensor, in float64."""
    if img.c != 3:
        raise DimensionError(f"rgb_to_y needs 3 channels, got shape {img.shape}")
    data = img.data.astype(np.float64)
    y = np.tensordot(BT601, data, axes=((0,), (1,))) + 16.0
    return Tensor4.wrap((y / 255.0)[:, None])


def _check_pair(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError("metric inputs differ in shape: " + describe_shapes(a=a.shape, b=b.shape))


def psnr(a: Tensor4 | np.ndarray, b: Tensor4 | np.ndarray, peak: float = 1.0) -> float:
    """10·log10(peak² / MSE); identical inputs give ``inf``."""
    x, y = _array(a), _array(b)
    _check_pair(x, y)
    diff = x - y
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian of ``size`` taps centered on the middle one."""
    x = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    taps = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def _filter_valid(x: np.ndarray, taps: np.ndarray) -> np.ndarray:
    size = len(taps)
    h = x.shape[-2] - size + 1
    w = x.shape[-1] - size + 1
    rows = sum(t * x[..., i : i + h, :] for i, t in enumerate(taps))
    return sum(t * rows[..., :, j : j + w] for j, t in enumerate(taps))


def ssim(
    a: Tensor4 | np.ndarray,
    b: Tensor4 | np.ndarray,
    *,
    window_size: int = 11,
    sigma: float = 1.5,
    peak: float = 1.0,
    k1: float = 0.01,
    k2: float = 0.03,
) -> float:
    """Gaussian-windowed SSIM averaged over every valid window and channel."""
    x, y = _array(a), _array(b)
    _check_pair(x, y)
    if window_size < 1 or window_size > min(x.shape[-2:]):
        raise ArgumentError(
            f"SSIM window {window_size} does not fit images of size {x.shape[-2]}x{x.shape[-1]}"
        )
    taps = gaussian_window(window_size, sigma)
    c1 = (k1 * peak) ** 2
    c2 = (k2 * peak) ** 2
    mu_x = _filter_valid(x, taps)
    mu_y = _filter_valid(y, taps)
    var_x = _filter_valid(x * x, taps) - mu_x * mu_x
    var_y = _filter_valid(y * y, taps) - mu_y * mu_y
    cov = _filter_valid(x * y, taps) - mu_x * mu_y
    numerator = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    denominator = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float(np.mean(numerator / denominator))
