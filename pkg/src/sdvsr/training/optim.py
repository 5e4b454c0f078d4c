"""Adam optimizer and the step learning-rate schedule."""
from __future__ import annotations

import logging
from collections.abc import Mapping, MutableMapping
from dataclasses import dataclass, field

import numpy as np

from sdvsr.errors import ArgumentError, DimensionError, NumericAbortError, UsageError

logger = logging.getLogger(__name__)


@dataclass
class OptimState:
    """Adam moments per parameter plus the shared step counter."""

    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(
        cls, params: Mapping[str, np.ndarray], beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8
    ) -> OptimState:
        return cls(
            m={name: np.zeros_like(p) for name, p in params.items()},
            v={name: np.zeros_like(p) for name, p in params.items()},
            beta1=beta1,
            beta2=beta2,
            eps=eps,
        )


def adam_step(
    params: MutableMapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: OptimState,
    lr: float,
) -> tuple[MutableMapping[str, np.ndarray], OptimState]:
    """Bias-corrected Adam update, applied in place.

    Every gradient is checked before any parameter changes, so a non-finite
    gradient leaves ``params`` and ``state`` untouched.
    """
    for name, param in params.items():
        if name not in grads:
            raise UsageError(f"no gradient for parameter {name!r}")
        grad = grads[name]
        if grad.shape != param.shape or state.m[name].shape != param.shape:
            raise DimensionError(
                f"parameter {name}: value {param.shape}, grad {grad.shape}, moment {state.m[name].shape}"
            )
        if not np.isfinite(grad).all():
            raise NumericAbortError(f"non-finite gradient for parameter {name!r} at step {state.step + 1}")

    state.step += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1**state.step
    correction2 = 1.0 - b2**state.step
    for name, param in params.items():
        grad = grads[name]
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * grad
        v *= b2
        v += (1.0 - b2) * grad * grad
        m_hat = m / correction1
        v_hat = v / correction2
        param -= (lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(param.dtype, copy=False)
    return params, state


class Adam:
    """Thin stateful wrapper over :func:`adam_step`."""

    def __init__(self, params: MutableMapping[str, np.ndarray], beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
        self.params = params
        self.state = OptimState.for_params(params, beta1, beta2, eps)

    def step(self, grads: Mapping[str, np.ndarray], lr: float) -> None:
        adam_step(self.params, grads, self.state, lr)


@dataclass(frozen=True)
class StepSchedule:
    """Constant rate, multiplied by ``decay`` every ``step_epochs``; training stops at ``total_epochs``."""

    base_lr: float = 1e-4
    decay: float = 0.1
    step_epochs: int = 60
    total_epochs: int = 70

    def lr(self, epoch: int) -> float:
        if epoch < 0:
            raise ArgumentError(f"epoch must be >= 0, got {epoch}")
        return self.base_lr * self.decay ** (epoch // self.step_epochs)

    def finished(self, epoch: int) -> bool:
        return epoch >= self.total_epochs


def lr_schedule(epoch: int, schedule: StepSchedule | None = None) -> float:
    return (schedule or StepSchedule()).lr(epoch)
