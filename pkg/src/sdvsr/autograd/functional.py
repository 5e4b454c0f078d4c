"""Differentiable counterparts of the tensor-core operations."""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from sdvsr.autograd.tape import Function, Variable
from sdvsr.errors import DimensionError, UsageError
from sdvsr.tensor import kernels, ops, resample


class Conv2dFn(Function):
    name = "conv2d"

    def __init__(self, stride: int, padding: int, padding_mode: str) -> None:
        self.stride = stride
        self.padding = padding
        self.padding_mode = padding_mode

    def forward(self, x, weight, bias):  # type: ignore[override]
        return kernels.conv2d_forward(
            x, weight, bias.reshape(-1), self.stride, self.padding, self.padding_mode
        )

    def backward(self, grad, inputs, output):  # type: ignore[override]
        x, weight, bias = inputs
        grad_x, grad_w, grad_b = kernels.conv2d_backward(
            grad, x, weight, self.stride, self.padding, self.padding_mode
        )
        return grad_x, grad_w, grad_b.reshape(bias.shape)


def conv2d(
    x: Variable,
    weight: Variable,
    bias: Variable,
    *,
    stride: int = 1,
    padding: int = 1,
    padding_mode: str = "zeros",
) -> Variable:
    """``bias`` is stored as a (1, out_c, 1, 1) tensor."""
    ops.check_conv(x.shape, weight.shape, stride, padding)
    if bias.shape != (1, weight.shape[0], 1, 1):
        raise DimensionError(
            f"conv2d bias must be (1, {weight.shape[0]}, 1, 1), got {bias.shape}"
        )
    return x.tape.record(Conv2dFn(stride, padding, padding_mode), [x, weight, bias])


class SpatiallyVariantFilterFn(Function):
    name = "spatially_variant_filter"

    def __init__(self, k: int) -> None:
        self.k = k

    def forward(self, hidden, filters):  # type: ignore[override]
        return kernels.svf_forward(hidden, filters, self.k)

    def backward(self, grad, inputs, output):  # type: ignore[override]
        hidden, filters = inputs
        return kernels.svf_backward(grad, hidden, filters, self.k)


def spatially_variant_filter(hidden: Variable, filters: Variable, k: int) -> Variable:
    ops.check_svf(hidden.shape, filters.shape, k)
    return hidden.tape.record(SpatiallyVariantFilterFn(k), [hidden, filters])


class ResizeFn(Function):
    name = "bicubic_resize"

    def __init__(self, scale: resample.ScaleArg, antialias: bool) -> None:
        self.scale = scale
        self.antialias = antialias

    def forward(self, x):  # type: ignore[override]
        return resample.resize_array(x, self.scale, self.antialias)

    def backward(self, grad, inputs, output):  # type: ignore[override]
        (x,) = inputs
        return (resample.resize_array_backward(grad, x.shape, self.scale, self.antialias),)


def bicubic_resize(x: Variable, scale: resample.ScaleArg, antialias: bool = True) -> Variable:
    return x.tape.record(ResizeFn(scale, antialias), [x])


class PixelShuffleFn(Function):
    name = "pixel_shuffle"

    def __init__(self, r: int) -> None:
        self.r = r

    def forward(self, x):  # type: ignore[override]
        return kernels.pixel_shuffle(x, self.r)

    def backward(self, grad, inputs, output):  # type: ignore[override]
        return (kernels.pixel_unshuffle(grad, self.r),)


class PixelUnshuffleFn(Function):
    name = "pixel_unshuffle"

    def __init__(self, r: int) -> None:
        self.r = r

    def forward(self, x):  # type: ignore[override]
        return kernels.pixel_unshuffle(x, self.r)

    def backward(self, grad, inputs, output):  # type: ignore[override]
        return (kernels.pixel_shuffle(grad, self.r),)


def pixel_shuffle(x: Variable, r: int) -> Variable:
    ops.check_shuffle(x.shape, r)
    return x.tape.record(PixelShuffleFn(r), [x])


def pixel_unshuffle(x: Variable, r: int) -> Variable:
    ops.check_unshuffle(x.shape, r)
    return x.tape.record(PixelUnshuffleFn(r), [x])


class AddFn(Function):
    name = "add"

    def forward(self, a, b):  # type: ignore[override]
        return a + b

    def backward(self, grad, inputs, output):  # type: ignore[override]
        return grad, grad


class SubFn(Function):
    name = "sub"

    def forward(self, a, b):  # type: ignore[override]
        return a - b

    def backward(self, grad, inputs, output):  # type: ignore[override]
        return grad, -grad


class MulFn(Function):
    name = "mul"

    def forward(self, a, b):  # type: ignore[override]
        return a * b

    def backward(self, grad, inputs, output):  # type: ignore[override]
        a, b = inputs
        return grad * b, grad * a


def add(a: Variable, b: Variable) -> Variable:
    ops.check_same_shape("add", a.shape, b.shape)
    return a.tape.record(AddFn(), [a, b])


def sub(a: Variable, b: Variable) -> Variable:
    ops.check_same_shape("sub", a.shape, b.shape)
    return a.tape.record(SubFn(), [a, b])


def mul(a: Variable, b: Variable) -> Variable:
    ops.check_same_shape("mul", a.shape, b.shape)
    return a.tape.record(MulFn(), [a, b])


class ScaleFn(Function):
    name = "scale"

    def __init__(self, factor: float) -> None:
        self.factor = factor

    def forward(self, x):  # type: ignore[override]
        return (x * self.factor).astype(x.dtype, copy=False)

    def backward(self, grad, inputs, output):  # type: ignore[override]
        return ((grad * self.factor).astype(grad.dtype, copy=False),)


def scale(x: Variable, factor: float) -> Variable:
    return x.tape.record(ScaleFn(factor), [x])


class ReluFn(Function):
    name = "relu"

    def forward(self, x):  # type: ignore[override]
        return kernels.relu(x)

    def backward(self, grad, inputs, output):  # type: ignore[override]
        (x,) = inputs
        return (grad * (x > 0),)


class SigmoidFn(Function):
    name = "sigmoid"

    def forward(self, x):  # type: ignore[override]
        return kernels.sigmoid(x)

    def backward(self, grad, inputs, output):  # type: ignore[override]
        return (grad * output * (1 - output),)


def relu(x: Variable) -> Variable:
    return x.tape.record(ReluFn(), [x])


def sigmoid(x: Variable) -> Variable:
    return x.tape.record(SigmoidFn(), [x])


class ConcatFn(Function):
    name = "concat_channels"

    def forward(self, *xs):  # type: ignore[override]
        return np.concatenate(xs, axis=1)

    def backward(self, grad, inputs, output):  # type: ignore[override]
        bounds = np.cumsum([x.shape[1] for x in inputs])[:-1]
        return [np.ascontiguousarray(part) for part in np.split(grad, bounds, axis=1)]


def concat_channels(xs: Sequence[Variable]) -> Variable:
    ops.check_concat([x.shape for x in xs])
    if len({x.dtype for x in xs}) != 1:
        raise DimensionError("concat_channels needs inputs of one dtype")
    return xs[0].tape.record(ConcatFn(), list(xs))


class SumFn(Function):
    name = "sum"

    def forward(self, x):  # type: ignore[override]
        return np.asarray(x.sum(dtype=np.float64), dtype=x.dtype).reshape(1, 1, 1, 1)

    def backward(self, grad, inputs, output):  # type: ignore[override]
        (x,) = inputs
        return (np.full(x.shape, grad.reshape(-1)[0], dtype=x.dtype),)


class MeanFn(Function):
    name = "mean"

    def forward(self, x):  # type: ignore[override]
        return np.asarray(x.mean(dtype=np.float64), dtype=x.dtype).reshape(1, 1, 1, 1)

    def backward(self, grad, inputs, output):  # type: ignore[override]
        (x,) = inputs
        return (np.full(x.shape, grad.reshape(-1)[0] / x.size, dtype=x.dtype),)


def sum(x: Variable) -> Variable:  # noqa: A001
    return x.tape.record(SumFn(), [x])


def mean(x: Variable) -> Variable:
    return x.tape.record(MeanFn(), [x])


class CharbonnierFn(Function):
    """mean(sqrt((x - y)^2 + eps^2)) as a (1, 1, 1, 1) value."""

    name = "charbonnier"

    def __init__(self, eps: float) -> None:
        self.eps = eps

    def forward(self, x, y):  # type: ignore[override]
        diff = x.astype(np.float64) - y.astype(np.float64)
        self._diff = diff
        self._root = np.sqrt(diff * diff + self.eps * self.eps)
        return np.asarray(self._root.mean(), dtype=x.dtype).reshape(1, 1, 1, 1)

    def backward(self, grad, inputs, output):  # type: ignore[override]
        x, y = inputs
        g = float(grad.reshape(-1)[0]) * self._diff / self._root / self._diff.size
        return g.astype(x.dtype), (-g).astype(y.dtype)


def charbonnier(x: Variable, y: Variable, eps: float = 1e-3) -> Variable:
    ops.check_same_shape("charbonnier", x.shape, y.shape)
    if not eps > 0:
        raise UsageError(f"charbonnier eps must be positive, got {eps}")
    return x.tape.record(CharbonnierFn(eps), [x, y])
