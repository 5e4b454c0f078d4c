"""Three-term Charbonnier objective over structure, detail and image."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from sdvsr.autograd import functional as F
from sdvsr.autograd.tape import Tape, Variable
from sdvsr.errors import ArgumentError, UsageError
from sdvsr.model.config import Decomposition
from sdvsr.model.decompose import decompose
from sdvsr.model.rsdn import CellOutput, TapeStep
from sdvsr.tensor.ops import check_same_shape
from sdvsr.tensor.tensor4 import Tensor4

TERMS = ("structure", "detail", "image")


@dataclass(frozen=True)
class LossWeights:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    epsilon: float = 1e-3

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            if getattr(self, name) < 0:
                raise ArgumentError(f"loss weight {name} must be >= 0, got {getattr(self, name)}")
        if not self.epsilon > 0:
            raise ArgumentError(f"charbonnier epsilon must be positive, got {self.epsilon}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)

    @property
    def active_terms(self) -> tuple[str, ...]:
        return tuple(term for term, w in zip(TERMS, self.as_tuple(), strict=True) if w != 0)


@dataclass(frozen=True)
class HrTargets:
    s_hr: Tensor4
    d_hr: Tensor4
    i_hr: Tensor4


@dataclass(frozen=True)
class LossBreakdown:
    """Objective value and its per-term means over time steps."""

    total: float
    structure: float
    detail: float
    image: float
    active: tuple[str, ...]

    def as_dict(self) -> dict[str, float]:
        return {
            "total": self.total,
            "structure": self.structure,
            "detail": self.detail,
            "image": self.image,
        }


def charbonnier(x: Tensor4, y: Tensor4, eps: float = 1e-3) -> float:
    """Mean of sqrt((x - y)^2 + eps^2) over all elements."""
    check_same_shape("charbonnier", x.shape, y.shape)
    diff = x.data.astype(np.float64) - y.data.astype(np.float64)
    return float(np.sqrt(diff * diff + eps * eps).mean())


def hr_targets(
    hr_frame: Tensor4,
    r: int,
    *,
    method: Decomposition | str = Decomposition.BICUBIC,
    sigma: float = 1.6,
) -> HrTargets:
    """Split a ground-truth HR frame with the same operator the cell uses on LR input."""
    s, d = decompose(hr_frame, r, method=method, sigma=sigma)
    return HrTargets(s_hr=s, d_hr=d, i_hr=Tensor4.wrap(hr_frame.data.astype(np.float64)))


def _check_lengths(outputs: Sequence[object], targets: Sequence[HrTargets]) -> None:
    if len(outputs) != len(targets):
        raise UsageError(f"{len(outputs)} outputs for {len(targets)} targets")
    if not outputs:
        raise UsageError("loss needs at least one time step")


def total_loss(
    outputs: Sequence[CellOutput], targets: Sequence[HrTargets], weights: LossWeights
) -> LossBreakdown:
    """(1/N) Σ_t (α·L_S + β·L_D + γ·L_I) evaluated directly on tensors."""
    _check_lengths(outputs, targets)
    eps = weights.epsilon
    sums = np.zeros(3)
    for output, target in zip(outputs, targets, strict=True):
        sums += (
            charbonnier(output.s_hr, target.s_hr, eps),
            charbonnier(output.d_hr, target.d_hr, eps),
            charbonnier(output.i_hr, target.i_hr, eps),
        )
    means = sums / len(outputs)
    total = float(np.dot(weights.as_tuple(), means))
    return LossBreakdown(total, *map(float, means), active=weights.active_terms)


def tape_loss(
    tape: Tape,
    steps: Sequence[TapeStep],
    targets: Sequence[HrTargets],
    weights: LossWeights,
) -> tuple[Variable, LossBreakdown]:
    """Record the objective on ``tape``.

    Terms with zero weight are measured for the breakdown but never recorded,
    so they contribute no gradient.
    """
    _check_lengths(steps, targets)
    eps = weights.epsilon
    weighted: list[Variable] = []
    sums = np.zeros(3)
    for step, target in zip(steps, targets, strict=True):
        pairs = ((step.s_hr, target.s_hr), (step.d_hr, target.d_hr), (step.i_hr, target.i_hr))
        for index, ((pred, truth), weight) in enumerate(zip(pairs, weights.as_tuple(), strict=True)):
            truth = truth.astype(pred.dtype)
            if weight == 0:
                sums[index] += charbonnier(pred.value, truth, eps)
                continue
            term = F.charbonnier(pred, tape.constant(truth), eps)
            sums[index] += float(term.data.reshape(-1)[0])
            weighted.append(F.scale(term, weight))
    if not weighted:
        raise UsageError("all loss weights are zero")
    loss = weighted[0]
    for term in weighted[1:]:
        loss = F.add(loss, term)
    loss = F.scale(loss, 1.0 / len(steps))
    means = sums / len(steps)
    breakdown = LossBreakdown(
        total=float(loss.data.reshape(-1)[0]),
        structure=float(means[0]),
        detail=float(means[1]),
        image=float(means[2]),
        active=weights.active_terms,
    )
    return loss, breakdown
