"""Array-level numeric kernels and their adjoints.

Everything here works on plain ``numpy`` arrays in (n, c, h, w) layout and
does no validation; ``sdvsr.tensor.ops`` and ``sdvsr.autograd`` check shapes
before calling in.
"""
from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

PADDING_MODES = ("zeros", "reflect")


def pad(x: np.ndarray, padding: int, mode: str = "zeros") -> np.ndarray:
    if padding == 0:
        return x
    widths = ((0, 0), (0, 0), (padding, padding), (padding, padding))
    if mode == "reflect":
        return np.pad(x, widths, mode="reflect")
    return np.pad(x, widths, mode="constant")


def unpad_grad(
    grad: np.ndarray, padding: int, mode: str, shape: tuple[int, ...]
) -> np.ndarray:
    """Adjoint of :func:`pad`: fold a padded-domain gradient onto ``shape``."""
    if padding == 0:
        return grad
    h, w = shape[2], shape[3]
    if mode == "zeros":
        return grad[:, :, padding : padding + h, padding : padding + w]
    rows = np.pad(np.arange(h), padding, mode="reflect")
    cols = np.pad(np.arange(w), padding, mode="reflect")
    folded_rows = np.zeros(grad.shape[:2] + (h, grad.shape[3]), dtype=grad.dtype)
    np.add.at(folded_rows, (slice(None), slice(None), rows), grad)
    out = np.zeros(tuple(shape), dtype=grad.dtype)
    np.add.at(out, (slice(None), slice(None), slice(None), cols), folded_rows)
    return out


def im2col(x_padded: np.ndarray, kh: int, kw: int, stride: int) -> np.ndarray:
    """Strided window view of shape (n, c, out_h, out_w, kh, kw)."""
    windows = sliding_window_view(x_padded, (kh, kw), axis=(2, 3))
    return windows[:, :, ::stride, ::stride]


def conv2d_forward(
    x: np.ndarray,
    weight: np.ndarray,
    bias: np.ndarray | None,
    stride: int = 1,
    padding: int = 0,
    padding_mode: str = "zeros",
) -> np.ndarray:
    kh, kw = weight.shape[2], weight.shape[3]
    cols = im2col(pad(x, padding, padding_mode), kh, kw, stride)
    # contracting (c, kh, kw) materializes the column matrix and runs one GEMM
    out = np.tensordot(cols, weight, axes=((1, 4, 5), (1, 2, 3)))
    out = out.transpose(0, 3, 1, 2)
    if bias is not None:
        out = out + bias.reshape(1, -1, 1, 1)
    return np.ascontiguousarray(out, dtype=x.dtype)


def conv2d_backward(
    grad_out: np.ndarray,
    x: np.ndarray,
    weight: np.ndarray,
    stride: int = 1,
    padding: int = 0,
    padding_mode: str = "zeros",
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (grad_x, grad_weight, grad_bias)."""
    kh, kw = weight.shape[2], weight.shape[3]
    x_padded = pad(x, padding, padding_mode)
    cols = im2col(x_padded, kh, kw, stride)
    grad_weight = np.tensordot(grad_out, cols, axes=((0, 2, 3), (0, 2, 3)))
    grad_bias = grad_out.sum(axis=(0, 2, 3))

    dcols = np.tensordot(grad_out, weight, axes=((1,), (0,)))  # (n, oh, ow, c, kh, kw)
    out_h, out_w = grad_out.shape[2], grad_out.shape[3]
    grad_padded = np.zeros_like(x_padded)
    for i in range(kh):
        for j in range(kw):
            grad_padded[
                :, :, i : i + stride * (out_h - 1) + 1 : stride, j : j + stride * (out_w - 1) + 1 : stride
            ] += dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
    grad_x = unpad_grad(grad_padded, padding, padding_mode, x.shape)
    return (
        np.ascontiguousarray(grad_x, dtype=x.dtype),
        grad_weight.astype(weight.dtype, copy=False),
        grad_bias.astype(weight.dtype, copy=False),
    )


def svf_forward(hidden: np.ndarray, filters: np.ndarray, k: int) -> np.ndarray:
    """Per-pixel k×k filtering shared across hidden channels, zero borders."""
    n, _, h, w = hidden.shape
    radius = k // 2
    padded = pad(hidden, radius, "zeros")
    taps = filters.reshape(n, k * k, 1, h, w)
    out = np.zeros_like(hidden)
    for u in range(k):
        for v in range(k):
            out += padded[:, :, u : u + h, v : v + w] * taps[:, u * k + v]
    return out


def svf_backward(
    grad_out: np.ndarray, hidden: np.ndarray, filters: np.ndarray, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """Return (grad_hidden, grad_filters)."""
    n, _, h, w = hidden.shape
    radius = k // 2
    padded = pad(hidden, radius, "zeros")
    taps = filters.reshape(n, k * k, 1, h, w)
    grad_padded = np.zeros_like(padded)
    grad_filters = np.zeros_like(filters)
    for u in range(k):
        for v in range(k):
            tap = u * k + v
            window = padded[:, :, u : u + h, v : v + w]
            grad_filters[:, tap] = (grad_out * window).sum(axis=1)
            grad_padded[:, :, u : u + h, v : v + w] += grad_out * taps[:, tap]
    grad_hidden = grad_padded[:, :, radius : radius + h, radius : radius + w]
    return np.ascontiguousarray(grad_hidden), grad_filters


def pixel_shuffle(x: np.ndarray, r: int) -> np.ndarray:
    n, c, h, w = x.shape
    out_c = c // (r * r)
    y = x.reshape(n, out_c, r, r, h, w).transpose(0, 1, 4, 2, 5, 3)
    return np.ascontiguousarray(y.reshape(n, out_c, h * r, w * r))


def pixel_unshuffle(x: np.ndarray, r: int) -> np.ndarray:
    n, c, h, w = x.shape
    y = x.reshape(n, c, h // r, r, w // r, r).transpose(0, 1, 3, 5, 2, 4)
    return np.ascontiguousarray(y.reshape(n, c * r * r, h // r, w // r))


def sigmoid(x: np.ndarray) -> np.ndarray:
    # tanh form stays finite for large |x| and gives exactly 0.5 at 0
    return (0.5 * (1.0 + np.tanh(0.5 * x))).astype(x.dtype, copy=False)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0).astype(x.dtype, copy=False)
