"""Building blocks of the recurrent cell, expressed on an autograd tape."""
from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from sdvsr.autograd import functional as F
from sdvsr.autograd.tape import Tape, Variable
from sdvsr.errors import DimensionError, UsageError
from sdvsr.model.config import BlockVariant
from sdvsr.tensor.ops import check_same_shape


class ParameterScope:
    """Resolves parameter names to leaves of one tape."""

    def __init__(self, tape: Tape, params: Mapping[str, np.ndarray]) -> None:
        self.tape = tape
        self.params = params

    def __call__(self, name: str) -> Variable:
        try:
            array = self.params[name]
        except KeyError:
            raise UsageError(f"model has no parameter {name!r}") from None
        return self.tape.parameter(name, array)

    def conv(self, name: str, x: Variable) -> Variable:
        """3×3 zero-padded convolution ``name`` applied to ``x``."""
        return F.conv2d(x, self(f"{name}.weight"), self(f"{name}.bias"), padding=1)


def residual_block(scope: ParameterScope, prefix: str, x: Variable) -> Variable:
    """x + conv2(relu(conv1(x)))."""
    inner = F.relu(scope.conv(f"{prefix}.conv1", x))
    return F.add(x, scope.conv(f"{prefix}.conv2", inner))


def sd_block(
    scope: ParameterScope,
    prefix: str,
    s: Variable,
    d: Variable,
    variant: BlockVariant | str,
) -> tuple[Variable, Variable]:
    """One structure/detail block.

    ``sd`` exchanges information through ``m = relu(s1(s)) + relu(d1(d))``;
    ``two_stream`` keeps the branches apart; ``one_stream`` runs a plain
    residual block on ``s`` and passes ``d`` through.
    """
    variant = BlockVariant(variant)
    check_same_shape("sd_block", s.shape, d.shape)
    if variant is BlockVariant.ONE_STREAM:
        return residual_block(scope, prefix, s), d
    a_s = F.relu(scope.conv(f"{prefix}.s1", s))
    a_d = F.relu(scope.conv(f"{prefix}.d1", d))
    if variant is BlockVariant.SD:
        mixed = F.add(a_s, a_d)
        return (
            F.add(s, scope.conv(f"{prefix}.s2", mixed)),
            F.add(d, scope.conv(f"{prefix}.d2", mixed)),
        )
    return (
        F.add(s, scope.conv(f"{prefix}.s2", a_s)),
        F.add(d, scope.conv(f"{prefix}.d2", a_d)),
    )


def hsa(scope: ParameterScope, frame: Variable, hidden: Variable, k: int) -> tuple[Variable, Variable]:
    """Gate ``hidden`` by its per-pixel correlation with ``frame``.

    Returns ``(M * hidden, M)`` where ``M = sigmoid(svf(hidden, relu(conv(frame))))``.
    """
    if frame.shape[0] != hidden.shape[0] or frame.shape[2:] != hidden.shape[2:]:
        raise DimensionError(
            "hsa frame and hidden disagree on batch or spatial size: "
            f"frame={frame.shape}, hidden={hidden.shape}"
        )
    filters = F.relu(scope.conv("hsa.filter", frame))
    gate = F.sigmoid(F.spatially_variant_filter(hidden, filters, k))
    return F.mul(gate, hidden), gate
