"""Direct loop implementations used as oracles for the vectorized kernels."""
from __future__ import annotations

import numpy as np

from sdvsr.tensor import kernels


def conv2d_naive(
    x: np.ndarray,
    weight: np.ndarray,
    bias: np.ndarray | None,
    stride: int = 1,
    padding: int = 0,
    padding_mode: str = "zeros",
) -> np.ndarray:
    n, c, _, _ = x.shape
    out_c, _, kh, kw = weight.shape
    xp = kernels.pad(x, padding, padding_mode)
    out_h = (xp.shape[2] - kh) // stride + 1
    out_w = (xp.shape[3] - kw) // stride + 1
    out = np.zeros((n, out_c, out_h, out_w), dtype=np.float64)
    for b in range(n):
        for o in range(out_c):
            for i in range(out_h):
                for j in range(out_w):
                    acc = 0.0 if bias is None else float(bias[o])
                    for ci in range(c):
                        for u in range(kh):
                            for v in range(kw):
                                acc += float(weight[o, ci, u, v]) * float(
                                    xp[b, ci, i * stride + u, j * stride + v]
                                )
                    out[b, o, i, j] = acc
    return out


def spatially_variant_filter_naive(
    hidden: np.ndarray, filters: np.ndarray, k: int
) -> np.ndarray:
    n, c, h, w = hidden.shape
    radius = k // 2
    out = np.zeros((n, c, h, w), dtype=np.float64)
    for b in range(n):
        for ch in range(c):
            for i in range(h):
                for j in range(w):
                    acc = 0.0
                    for u in range(-radius, radius + 1):
                        for v in range(-radius, radius + 1):
                            y, x = i + u, j + v
                            if 0 <= y < h and 0 <= x < w:
                                tap = (u + radius) * k + (v + radius)
                                acc += float(filters[b, tap, i, j]) * float(hidden[b, ch, y, x])
                    out[b, ch, i, j] = acc
    return out
