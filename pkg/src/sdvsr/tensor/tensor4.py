"""Immutable rank-4 tensor value type."""
from __future__ import annotations

from typing import Any

import numpy as np
from numpy.typing import ArrayLike, DTypeLike

from sdvsr.errors import DimensionError

FLOAT_DTYPES = (np.dtype(np.float32), np.dtype(np.float64))


def _resolve_dtype(array: np.ndarray, dtype: DTypeLike | None) -> np.dtype:
    if dtype is not None:
        resolved = np.dtype(dtype)
        if resolved not in FLOAT_DTYPES:
            raise DimensionError(f"Tensor4 supports float32/float64, got {resolved}")
        return resolved
    if array.dtype in FLOAT_DTYPES:
        return array.dtype
    return np.dtype(np.float32)


class Tensor4:
    """Dense (n, c, h, w) array of float32 or float64 values.

    The buffer is frozen on construction; every operation returns a new
    tensor.
    """

    __slots__ = ("_data", "requires_grad")

    def __init__(
        self,
        data: ArrayLike,
        *,
        dtype: DTypeLike | None = None,
        requires_grad: bool = False,
    ) -> None:
        array = np.asarray(data)
        array = np.array(array, dtype=_resolve_dtype(array, dtype), copy=True, order="C")
        if array.ndim != 4:
            raise DimensionError(f"Tensor4 needs rank 4, got shape {array.shape}")
        array.flags.writeable = False
        self._data = array
        self.requires_grad = requires_grad

    @classmethod
    def wrap(cls, array: np.ndarray, *, requires_grad: bool = False) -> Tensor4:
        """Adopt ``array`` without copying; the caller gives up write access."""
        if array.ndim != 4:
            raise DimensionError(f"Tensor4 needs rank 4, got shape {array.shape}")
        if array.dtype not in FLOAT_DTYPES:
            array = array.astype(np.float32)
        view = array.view()
        view.flags.writeable = False
        tensor = cls.__new__(cls)
        tensor._data = view
        tensor.requires_grad = requires_grad
        return tensor

    @classmethod
    def zeros(cls, shape: tuple[int, int, int, int], dtype: DTypeLike = np.float32) -> Tensor4:
        return cls.wrap(np.zeros(shape, dtype=dtype))

    @classmethod
    def full(
        cls, shape: tuple[int, int, int, int], value: float, dtype: DTypeLike = np.float32
    ) -> Tensor4:
        return cls.wrap(np.full(shape, value, dtype=dtype))

    @property
    def data(self) -> np.ndarray:
        """Read-only view of the row-major buffer."""
        return self._data

    def numpy(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self._data.shape  # type: ignore[return-value]

    @property
    def dtype(self) -> np.dtype:
        return self._data.dtype

    @property
    def n(self) -> int:
        return self.shape[0]

    @property
    def c(self) -> int:
        return self.shape[1]

    @property
    def h(self) -> int:
        return self.shape[2]

    @property
    def w(self) -> int:
        return self.shape[3]

    @property
    def size(self) -> int:
        return int(self._data.size)

    def astype(self, dtype: DTypeLike) -> Tensor4:
        if np.dtype(dtype) == self.dtype:
            return self
        return Tensor4(self._data, dtype=dtype, requires_grad=self.requires_grad)

    def is_finite(self) -> bool:
        """True when no element is NaN or infinite."""
        return bool(np.isfinite(self._data).all())

    def item(self) -> float:
        if self.size != 1:
            raise DimensionError(f"item() needs a single element, got shape {self.shape}")
        return float(self._data.reshape(-1)[0])

    def __add__(self, other: Tensor4) -> Tensor4:
        from sdvsr.tensor.ops import add

        return add(self, other)

    def __sub__(self, other: Tensor4) -> Tensor4:
        from sdvsr.tensor.ops import sub

        return sub(self, other)

    def __mul__(self, other: Tensor4) -> Tensor4:
        from sdvsr.tensor.ops import mul

        return mul(self, other)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Tensor4):
            return NotImplemented
        return self.dtype == other.dtype and np.array_equal(self._data, other._data)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Tensor4(shape={self.shape}, dtype={self.dtype.name})"
