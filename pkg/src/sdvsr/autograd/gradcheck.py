"""Finite-difference verification of tape gradients."""
from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np

from sdvsr.autograd.tape import Tape, Variable
from sdvsr.errors import UsageError

logger = logging.getLogger(__name__)

LossFn = Callable[[Tape, Mapping[str, np.ndarray]], Variable]


@dataclass(frozen=True)
class GradCheckReport:
    """Result of a :func:`grad_check` run."""

    max_rel_error: float
    worst_parameter: str | None
    per_parameter: dict[str, float] = field(default_factory=dict)
    has_nan: bool = False
    checked: int = 0

    def passed(self, tolerance: float = 1e-5) -> bool:
        return not self.has_nan and self.max_rel_error < tolerance


def _loss_value(fn: LossFn, params: Mapping[str, np.ndarray]) -> float:
    tape = Tape(enabled=False)
    loss = fn(tape, params)
    return float(loss.data.reshape(-1)[0])


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / (abs(analytic) + abs(numeric) + 1e-12)


def grad_check(
    fn: LossFn,
    params: Mapping[str, np.ndarray],
    eps: float = 1e-4,
    *,
    samples_per_param: int | None = 8,
    seed: int = 0,
) -> GradCheckReport:
    """Compare analytic gradients with central differences.

    ``fn`` builds a scalar loss on the given tape, reading every parameter via
    ``tape.parameter(name, params[name])``. Up to ``samples_per_param``
    coordinates per parameter are drawn from a seeded generator; ``None``
    checks every coordinate.
    """
    if not eps > 0:
        raise UsageError(f"grad_check eps must be positive, got {eps}")
    tape = Tape()
    loss = fn(tape, params)
    analytic = tape.backward(loss).parameters()
    missing = set(params) - set(analytic)
    if missing:
        raise UsageError(f"loss does not use parameters: {sorted(missing)}")

    rng = np.random.default_rng(seed)
    working = {name: np.array(value, copy=True) for name, value in params.items()}
    per_parameter: dict[str, float] = {}
    has_nan = False
    checked = 0
    for name in params:
        array = working[name]
        size = array.size
        if samples_per_param is None or samples_per_param >= size:
            coords = np.arange(size)
        else:
            coords = rng.choice(size, size=samples_per_param, replace=False)
        flat = array.reshape(-1)
        grad_flat = analytic[name].reshape(-1)
        worst = 0.0
        for index in coords:
            original = flat[index]
            flat[index] = original + eps
            plus = _loss_value(fn, working)
            flat[index] = original - eps
            minus = _loss_value(fn, working)
            flat[index] = original
            numeric = (plus - minus) / (2.0 * eps)
            error = relative_error(float(grad_flat[index]), numeric)
            if math.isnan(error):
                has_nan = True
                continue
            worst = max(worst, error)
            checked += 1
        per_parameter[name] = worst
        logger.debug("grad_check %s: max rel error %.3e", name, worst)

    worst_parameter = max(per_parameter, key=per_parameter.__getitem__, default=None)
    max_rel_error = per_parameter[worst_parameter] if worst_parameter else 0.0
    return GradCheckReport(
        max_rel_error=max_rel_error,
        worst_parameter=worst_parameter,
        per_parameter=per_parameter,
        has_nan=has_nan,
        checked=checked,
    )
