"""Reverse-mode differentiation tape."""
from __future__ import annotations

import itertools
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from sdvsr.errors import UsageError
from sdvsr.tensor.tensor4 import Tensor4


class Function:
    """One differentiable operation.

    Subclasses implement ``forward`` on arrays and ``backward`` returning one
    gradient (or ``None``) per input. State needed by ``backward`` may be kept
    on ``self``; a fresh instance is recorded per call.
    """

    name = "function"

    def forward(self, *inputs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(
        self, grad: np.ndarray, inputs: Sequence[np.ndarray], output: np.ndarray
    ) -> Sequence[np.ndarray | None]:
        raise NotImplementedError


class Variable:
    """A tensor value living on a :class:`Tape`."""

    __slots__ = ("id", "value", "requires_grad", "name", "tape")

    def __init__(
        self, tape: Tape, id: int, value: Tensor4, requires_grad: bool, name: str | None
    ) -> None:
        self.tape = tape
        self.id = id
        self.value = value
        self.requires_grad = requires_grad
        self.name = name

    @property
    def data(self) -> np.ndarray:
        return self.value.data

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.value.shape

    @property
    def dtype(self) -> np.dtype:
        return self.value.dtype

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"Variable#{self.id}{label}(shape={self.shape}, requires_grad={self.requires_grad})"


@dataclass(frozen=True)
class Record:
    function: Function
    input_ids: tuple[int, ...]
    output_id: int


class GradientTable(Mapping[int, np.ndarray]):
    """Gradients by variable id, with a name-keyed view of parameters."""

    def __init__(self, grads: dict[int, np.ndarray], names: dict[str, int]) -> None:
        self._grads = grads
        self._names = names

    def __getitem__(self, key: int | Variable) -> np.ndarray:
        if isinstance(key, Variable):
            key = key.id
        return self._grads[key]

    def __iter__(self) -> Iterator[int]:
        return iter(self._grads)

    def __len__(self) -> int:
        return len(self._grads)

    def parameters(self) -> dict[str, np.ndarray]:
        return {name: self._grads[vid] for name, vid in self._names.items()}


class Tape:
    """Records operations in execution order and replays them backwards.

    With ``enabled=False`` operations still run eagerly but nothing is kept,
    which is how inference avoids holding every intermediate.
    """

    def __init__(self, *, enabled: bool = True) -> None:
        self.enabled = enabled
        self._ids = itertools.count()
        self._records: list[Record] = []
        self._values: dict[int, Variable] = {}
        self._parameters: dict[str, Variable] = {}

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> tuple[Record, ...]:
        return tuple(self._records)

    def _new(self, value: Tensor4, requires_grad: bool, name: str | None = None) -> Variable:
        variable = Variable(self, next(self._ids), value, requires_grad, name)
        if self.enabled and requires_grad:
            self._values[variable.id] = variable
        return variable

    def constant(self, value: Tensor4 | np.ndarray, name: str | None = None) -> Variable:
        tensor = value if isinstance(value, Tensor4) else Tensor4.wrap(np.asarray(value))
        return self._new(tensor, False, name)

    def variable(self, value: Tensor4 | np.ndarray, name: str | None = None) -> Variable:
        """A leaf that receives a gradient."""
        tensor = value if isinstance(value, Tensor4) else Tensor4.wrap(np.asarray(value))
        return self._new(tensor, True, name)

    def parameter(self, name: str, array: np.ndarray) -> Variable:
        """Leaf for a named parameter, created once per tape.

        Reusing the same leaf at every time step lets gradients from the whole
        unrolled sequence accumulate on it.
        """
        existing = self._parameters.get(name)
        if existing is not None:
            return existing
        variable = self._new(Tensor4.wrap(array), True, name)
        self._parameters[name] = variable
        return variable

    @property
    def parameter_names(self) -> tuple[str, ...]:
        return tuple(self._parameters)

    def record(self, function: Function, inputs: Sequence[Variable]) -> Variable:
        """Run ``function`` on ``inputs`` now and remember how to differentiate it."""
        for variable in inputs:
            if variable.tape is not self:
                raise UsageError(
                    f"{function.name} got {variable!r} from a different tape"
                )
        output = function.forward(*(v.data for v in inputs))
        requires_grad = self.enabled and any(v.requires_grad for v in inputs)
        result = self._new(Tensor4.wrap(output), requires_grad)
        if requires_grad:
            self._records.append(Record(function, tuple(v.id for v in inputs), result.id))
            for variable in inputs:
                self._values.setdefault(variable.id, variable)
        return result

    def backward(self, loss: Variable) -> GradientTable:
        """Accumulate d(loss)/d(variable) for every variable that needs it."""
        if loss.tape is not self:
            raise UsageError("backward() called with a variable from a different tape")
        if loss.shape != (1, 1, 1, 1):
            raise UsageError(f"backward() needs a scalar (1, 1, 1, 1) loss, got {loss.shape}")
        if not self.enabled:
            raise UsageError("backward() called on a tape with recording disabled")
        grads: dict[int, np.ndarray] = {loss.id: np.ones(loss.shape, dtype=loss.dtype)}
        for record in reversed(self._records):
            grad = grads.get(record.output_id)
            if grad is None:
                continue
            inputs = [self._values[i] for i in record.input_ids]
            output = self._values[record.output_id]
            input_grads = record.function.backward(
                grad, [v.data for v in inputs], output.data
            )
            for variable, input_grad in zip(inputs, input_grads, strict=True):
                if input_grad is None or not variable.requires_grad:
                    continue
                if variable.id in grads:
                    grads[variable.id] = grads[variable.id] + input_grad
                else:
                    grads[variable.id] = input_grad
        for variable in self._values.values():
            if variable.requires_grad and variable.id not in grads:
                grads[variable.id] = np.zeros(variable.shape, dtype=variable.dtype)
        names = {name: v.id for name, v in self._parameters.items()}
        return GradientTable(grads, names)

