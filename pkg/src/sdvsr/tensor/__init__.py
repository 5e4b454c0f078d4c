"""Rank-4 tensor value type and numeric primitives."""
from sdvsr.tensor.ops import (
    ConvParams,
    add,
    concat_channels,
    conv2d,
    crop,
    flip_h,
    flip_v,
    mul,
    pixel_shuffle,
    pixel_unshuffle,
    relu,
    rot90,
    sigmoid,
    spatially_variant_filter,
    sub,
)
from sdvsr.tensor.resample import bicubic_resize, gaussian_blur, gaussian_kernel
from sdvsr.tensor.tensor4 import Tensor4

__all__ = [
    "ConvParams",
    "Tensor4",
    "add",
    "bicubic_resize",
    "concat_channels",
    "conv2d",
    "crop",
    "flip_h",
    "flip_v",
    "gaussian_blur",
    "gaussian_kernel",
    "mul",
    "pixel_shuffle",
    "pixel_unshuffle",
    "relu",
    "rot90",
    "sigmoid",
    "spatially_variant_filter",
    "sub",
]
