"""Validated tensor-core operations on :class:`Tensor4` values."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from sdvsr.errors import ArgumentError, DimensionError, describe_shapes
from sdvsr.tensor import kernels
from sdvsr.tensor.tensor4 import Tensor4


@dataclass(frozen=True, eq=False)
class ConvParams:
    """Weights and geometry of one 2-D convolution layer."""

    weight: Tensor4
    bias: np.ndarray
    stride: int = 1
    padding: int = 1
    padding_mode: str = "zeros"
    _bias: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        bias = np.asarray(self.bias, dtype=self.weight.dtype).reshape(-1)
        if bias.shape[0] != self.out_c:
            raise DimensionError(
                f"conv bias has {bias.shape[0]} entries for {self.out_c} output channels"
            )
        if self.stride < 1:
            raise ArgumentError(f"conv stride must be positive, got {self.stride}")
        if self.padding < 0:
            raise ArgumentError(f"conv padding must be non-negative, got {self.padding}")
        if self.padding_mode not in kernels.PADDING_MODES:
            raise ArgumentError(
                f"padding_mode must be one of {kernels.PADDING_MODES}, got {self.padding_mode!r}"
            )
        bias.flags.writeable = False
        object.__setattr__(self, "_bias", bias)

    @property
    def out_c(self) -> int:
        return self.weight.shape[0]

    @property
    def in_c(self) -> int:
        return self.weight.shape[1]

    @property
    def kernel_size(self) -> tuple[int, int]:
        return self.weight.shape[2], self.weight.shape[3]

    @property
    def bias_array(self) -> np.ndarray:
        return self._bias


def conv_output_size(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


def check_conv(input_shape: tuple[int, ...], weight_shape: tuple[int, ...], stride: int, padding: int) -> None:
    if input_shape[1] != weight_shape[1]:
        raise DimensionError(
            "conv2d channel mismatch: "
            + describe_shapes(input=input_shape, weight=weight_shape)
        )
    out_h = conv_output_size(input_shape[2], weight_shape[2], stride, padding)
    out_w = conv_output_size(input_shape[3], weight_shape[3], stride, padding)
    if out_h <= 0 or out_w <= 0:
        raise DimensionError(
            "conv2d kernel larger than padded input: "
            + describe_shapes(input=input_shape, weight=weight_shape)
        )


def conv2d(input: Tensor4, params: ConvParams) -> Tensor4:
    check_conv(input.shape, params.weight.shape, params.stride, params.padding)
    out = kernels.conv2d_forward(
        input.data,
        params.weight.data,
        params.bias_array,
        params.stride,
        params.padding,
        params.padding_mode,
    )
    return Tensor4.wrap(out)


def check_svf(hidden_shape: tuple[int, ...], filters_shape: tuple[int, ...], k: int) -> None:
    if k < 1 or k % 2 == 0:
        raise ArgumentError(f"spatially variant filter size must be odd, got k={k}")
    if filters_shape[1] != k * k:
        raise DimensionError(
            f"filters need k*k={k * k} channels: "
            + describe_shapes(hidden=hidden_shape, filters=filters_shape)
        )
    if hidden_shape[0] != filters_shape[0] or hidden_shape[2:] != filters_shape[2:]:
        raise DimensionError(
            "hidden and filters disagree on batch or spatial size: "
            + describe_shapes(hidden=hidden_shape, filters=filters_shape)
        )


def spatially_variant_filter(hidden: Tensor4, filters: Tensor4, k: int) -> Tensor4:
    """Correlate every hidden channel with a per-pixel k×k filter."""
    check_svf(hidden.shape, filters.shape, k)
    return Tensor4.wrap(kernels.svf_forward(hidden.data, filters.data, k))


def check_shuffle(shape: tuple[int, ...], r: int) -> None:
    if r < 1:
        raise ArgumentError(f"shuffle factor must be positive, got {r}")
    if shape[1] % (r * r) != 0:
        raise DimensionError(f"pixel_shuffle needs channels divisible by {r * r}, got shape {shape}")


def check_unshuffle(shape: tuple[int, ...], r: int) -> None:
    if r < 1:
        raise ArgumentError(f"shuffle factor must be positive, got {r}")
    if shape[2] % r != 0 or shape[3] % r != 0:
        raise DimensionError(f"pixel_unshuffle needs h, w divisible by {r}, got shape {shape}")


def pixel_shuffle(input: Tensor4, r: int) -> Tensor4:
    """Depth-to-space: (n, c·r², h, w) -> (n, c, h·r, w·r)."""
    check_shuffle(input.shape, r)
    return Tensor4.wrap(kernels.pixel_shuffle(input.data, r))


def pixel_unshuffle(input: Tensor4, r: int) -> Tensor4:
    """Space-to-depth: (n, c, h·r, w·r) -> (n, c·r², h, w)."""
    check_unshuffle(input.shape, r)
    return Tensor4.wrap(kernels.pixel_unshuffle(input.data, r))


def check_same_shape(op: str, a: tuple[int, ...], b: tuple[int, ...]) -> None:
    if a != b:
        raise DimensionError(f"{op} needs identical shapes: " + describe_shapes(a=a, b=b))


def add(a: Tensor4, b: Tensor4) -> Tensor4:
    check_same_shape("add", a.shape, b.shape)
    return Tensor4.wrap(a.data + b.data)


def sub(a: Tensor4, b: Tensor4) -> Tensor4:
    check_same_shape("sub", a.shape, b.shape)
    return Tensor4.wrap(a.data - b.data)


def mul(a: Tensor4, b: Tensor4) -> Tensor4:
    check_same_shape("mul", a.shape, b.shape)
    return Tensor4.wrap(a.data * b.data)


def relu(x: Tensor4) -> Tensor4:
    return Tensor4.wrap(kernels.relu(x.data))


def sigmoid(x: Tensor4) -> Tensor4:
    return Tensor4.wrap(kernels.sigmoid(x.data))


def check_concat(shapes: list[tuple[int, ...]]) -> None:
    if not shapes:
        raise DimensionError("concat_channels needs at least one tensor")
    first = shapes[0]
    for shape in shapes[1:]:
        if shape[0] != first[0] or shape[2:] != first[2:]:
            raise DimensionError(
                "concat_channels needs equal batch and spatial size: "
                + ", ".join(str(s) for s in shapes)
            )


def concat_channels(tensors: list[Tensor4]) -> Tensor4:
    check_concat([t.shape for t in tensors])
    dtypes = {t.dtype for t in tensors}
    if len(dtypes) != 1:
        raise DimensionError(f"concat_channels needs one dtype, got {sorted(d.name for d in dtypes)}")
    return Tensor4.wrap(np.concatenate([t.data for t in tensors], axis=1))


def crop(x: Tensor4, top: int, left: int, height: int, width: int) -> Tensor4:
    if top < 0 or left < 0 or height <= 0 or width <= 0 or top + height > x.h or left + width > x.w:
        raise DimensionError(
            f"crop window ({top}, {left}, {height}, {width}) outside shape {x.shape}"
        )
    return Tensor4.wrap(np.ascontiguousarray(x.data[:, :, top : top + height, left : left + width]))


def flip_h(x: Tensor4) -> Tensor4:
    """Mirror left-right."""
    return Tensor4.wrap(np.ascontiguousarray(x.data[:, :, :, ::-1]))


def flip_v(x: Tensor4) -> Tensor4:
    """Mirror top-bottom."""
    return Tensor4.wrap(np.ascontiguousarray(x.data[:, :, ::-1, :]))


def rot90(x: Tensor4, k: int = 1) -> Tensor4:
    """Rotate counter-clockwise by ``k`` quarter turns in the (h, w) plane."""
    return Tensor4.wrap(np.ascontiguousarray(np.rot90(x.data, k=k, axes=(2, 3))))
