"""Recurrent structure-detail network."""
from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.typing import DTypeLike

from sdvsr.autograd import functional as F
from sdvsr.autograd.tape import Tape, Variable
from sdvsr.errors import ArgumentError, DimensionError, UsageError
from sdvsr.model.blocks import ParameterScope, hsa, residual_block, sd_block
from sdvsr.model.complexity import param_count
from sdvsr.model.config import InputMode, ModelConfig
from sdvsr.model.decompose import decompose
from sdvsr.model.layers import init_params, parameter_shapes
from sdvsr.tensor.tensor4 import Tensor4

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RecurrentState:
    """Carry between time steps: previous HR structure/detail and LR hidden map."""

    prev_s_hr: Tensor4
    prev_d_hr: Tensor4
    hidden: Tensor4


@dataclass(frozen=True)
class CellOutput:
    s_hr: Tensor4
    d_hr: Tensor4
    i_hr: Tensor4
    new_state: RecurrentState
    hsa_map: Tensor4 | None = None


@dataclass(frozen=True)
class TapeState:
    """:class:`RecurrentState` as tape variables, so gradients flow through time."""

    prev_s_hr: Variable
    prev_d_hr: Variable
    hidden: Variable


@dataclass(frozen=True)
class TapeStep:
    s_hr: Variable
    d_hr: Variable
    i_hr: Variable
    state: TapeState
    hsa_map: Variable | None


def frame_pairs(frames: Sequence[Tensor4]) -> list[tuple[Tensor4, Tensor4]]:
    """(previous, current) inputs per step, with the second frame mirrored in front.

    ``[A, B, C]`` gives ``(B, A), (A, B), (B, C)``; a single frame is paired
    with itself.
    """
    if not frames:
        raise ArgumentError("forward_sequence needs at least one frame")
    first = frames[0]
    for frame in frames[1:]:
        if frame.shape != first.shape:
            raise DimensionError(
                f"sequence frames differ in shape: {first.shape} vs {frame.shape}"
            )
    virtual = frames[1] if len(frames) > 1 else frames[0]
    previous = [virtual, *frames[:-1]]
    return list(zip(previous, frames, strict=True))


class RSDN:
    """The recurrent cell plus its parameters.

    Parameters live in a name-ordered dict of arrays. Forward passes read them
    through a tape; only the optimizer writes to them.
    """

    def __init__(self, config: ModelConfig, params: Mapping[str, np.ndarray]) -> None:
        expected = parameter_shapes(config)
        missing = sorted(set(expected) - set(params))
        unknown = sorted(set(params) - set(expected))
        if missing or unknown:
            raise UsageError(
                f"parameters do not match config: missing={missing}, unexpected={unknown}"
            )
        dtypes = {np.asarray(params[name]).dtype for name in expected}
        if len(dtypes) != 1:
            raise UsageError(f"parameters mix dtypes: {sorted(d.name for d in dtypes)}")
        self.config = config
        self.params: dict[str, np.ndarray] = {}
        for name, shape in expected.items():
            array = np.array(params[name], copy=True, order="C")
            if array.shape != shape:
                raise DimensionError(f"parameter {name} has shape {array.shape}, expected {shape}")
            self.params[name] = array

    @classmethod
    def from_seed(cls, config: ModelConfig, seed: int = 0, dtype: DTypeLike = np.float32) -> RSDN:
        return cls(config, init_params(config, np.random.default_rng(seed), dtype))

    @classmethod
    def zeros(cls, config: ModelConfig, dtype: DTypeLike = np.float32) -> RSDN:
        shapes = parameter_shapes(config)
        return cls(config, {name: np.zeros(shape, dtype=dtype) for name, shape in shapes.items()})

    @property
    def dtype(self) -> np.dtype:
        return next(iter(self.params.values())).dtype

    @property
    def param_count(self) -> int:
        return param_count(self.config)

    def astype(self, dtype: DTypeLike) -> RSDN:
        return RSDN(self.config, {k: v.astype(dtype) for k, v in self.params.items()})

    def copy(self) -> RSDN:
        return RSDN(self.config, self.params)

    def initial_state(self, n: int, h: int, w: int) -> RecurrentState:
        r = self.config.scale
        return RecurrentState(
            prev_s_hr=Tensor4.zeros((n, 3, h * r, w * r), self.dtype),
            prev_d_hr=Tensor4.zeros((n, 3, h * r, w * r), self.dtype),
            hidden=Tensor4.zeros((n, self.config.width, h, w), self.dtype),
        )

    def _check_state(self, frame_shape: tuple[int, ...], state: RecurrentState | TapeState) -> None:
        n, _, h, w = frame_shape
        r = self.config.scale
        hr_shape = (n, 3, h * r, w * r)
        hidden_shape = (n, self.config.width, h, w)
        if (
            state.prev_s_hr.shape != hr_shape
            or state.prev_d_hr.shape != hr_shape
            or state.hidden.shape != hidden_shape
        ):
            raise UsageError(
                f"state does not fit frames {tuple(frame_shape)}: expected HR {hr_shape} and "
                f"hidden {hidden_shape}, got {state.prev_s_hr.shape}, {state.prev_d_hr.shape}, "
                f"{state.hidden.shape}"
            )

    def _components(self, tape: Tape, frame: Tensor4) -> tuple[Variable, Variable]:
        if self.config.input_mode is InputMode.IMAGE:
            image = tape.constant(frame.astype(self.dtype))
            return image, image
        s, d = decompose(
            frame,
            self.config.scale,
            method=self.config.decomposition,
            sigma=self.config.lowpass_sigma,
        )
        return tape.constant(s.astype(self.dtype)), tape.constant(d.astype(self.dtype))

    def tape_state(self, tape: Tape, state: RecurrentState) -> TapeState:
        return TapeState(
            prev_s_hr=tape.constant(state.prev_s_hr.astype(self.dtype)),
            prev_d_hr=tape.constant(state.prev_d_hr.astype(self.dtype)),
            hidden=tape.constant(state.hidden.astype(self.dtype)),
        )

    def step(self, tape: Tape, prev_frame: Tensor4, cur_frame: Tensor4, state: TapeState) -> TapeStep:
        """One recurrent step recorded on ``tape``."""
        if prev_frame.shape != cur_frame.shape or prev_frame.c != 3:
            raise DimensionError(
                f"cell_step needs two (n, 3, h, w) frames, got {prev_frame.shape} and {cur_frame.shape}"
            )
        self._check_state(cur_frame.shape, state)
        config = self.config
        r = config.scale
        scope = ParameterScope(tape, self.params)
        current = tape.constant(cur_frame.astype(self.dtype))

        hidden = state.hidden
        gate = None
        if config.hsa_enabled:
            hidden, gate = hsa(scope, current, hidden, config.hsa_kernel)

        if config.one_stream:
            previous = tape.constant(prev_frame.astype(self.dtype))
            prev_hr = F.add(state.prev_s_hr, state.prev_d_hr)
            x = F.concat_channels([previous, current, F.pixel_unshuffle(prev_hr, r), hidden])
            features = scope.conv("head", x)
            for index in range(config.blocks):
                features = residual_block(scope, f"blocks.{index}", features)
            image_hr = F.pixel_shuffle(scope.conv("tail", features), r)
            low = F.bicubic_resize(image_hr, Fraction(1, r))
            s_hr = F.bicubic_resize(low, r)
            d_hr = F.sub(image_hr, s_hr)
            new_hidden = F.relu(scope.conv("fuse", features))
        else:
            s_prev, d_prev = self._components(tape, prev_frame)
            s_cur, d_cur = self._components(tape, cur_frame)
            s_in = F.concat_channels([s_prev, s_cur, F.pixel_unshuffle(state.prev_s_hr, r), hidden])
            d_in = F.concat_channels([d_prev, d_cur, F.pixel_unshuffle(state.prev_d_hr, r), hidden])
            hs = scope.conv("head.s", s_in)
            hd = scope.conv("head.d", d_in)
            for index in range(config.blocks):
                hs, hd = sd_block(scope, f"blocks.{index}", hs, hd, config.block_variant)
            s_hr = F.pixel_shuffle(scope.conv("tail.s", hs), r)
            d_hr = F.pixel_shuffle(scope.conv("tail.d", hd), r)
            new_hidden = F.relu(scope.conv("fuse", F.concat_channels([hs, hd])))

        i_hr = F.add(s_hr, d_hr)
        return TapeStep(
            s_hr=s_hr,
            d_hr=d_hr,
            i_hr=i_hr,
            state=TapeState(prev_s_hr=s_hr, prev_d_hr=d_hr, hidden=new_hidden),
            hsa_map=gate,
        )

    def unroll(self, tape: Tape, frames: Sequence[Tensor4]) -> list[TapeStep]:
        """Run the whole sequence on ``tape`` from a zero state."""
        pairs = frame_pairs(frames)
        n, _, h, w = frames[0].shape
        state = self.tape_state(tape, self.initial_state(n, h, w))
        steps: list[TapeStep] = []
        for prev_frame, cur_frame in pairs:
            step = self.step(tape, prev_frame, cur_frame, state)
            steps.append(step)
            state = step.state
        return steps

    def cell_step(self, prev_frame: Tensor4, cur_frame: Tensor4, state: RecurrentState) -> CellOutput:
        tape = Tape(enabled=False)
        self._check_state(cur_frame.shape, state)
        step = self.step(tape, prev_frame, cur_frame, self.tape_state(tape, state))
        return _to_output(step)

    def forward_sequence(self, frames: Sequence[Tensor4]) -> list[CellOutput]:
        """Inference over ``frames``; output ``t`` depends only on frames up to ``t``."""
        tape = Tape(enabled=False)
        outputs = [_to_output(step) for step in self.unroll(tape, frames)]
        logger.debug("forward_sequence: %d steps at %s", len(outputs), frames[0].shape)
        return outputs


def _to_output(step: TapeStep) -> CellOutput:
    return CellOutput(
        s_hr=step.s_hr.value,
        d_hr=step.d_hr.value,
        i_hr=step.i_hr.value,
        new_state=RecurrentState(
            prev_s_hr=step.state.prev_s_hr.value,
            prev_d_hr=step.state.prev_d_hr.value,
            hidden=step.state.hidden.value,
        ),
        hsa_map=step.hsa_map.value if step.hsa_map is not None else None,
    )
