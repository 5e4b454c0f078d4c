"""Paired LR/HR frame sequences."""
from __future__ import annotations

from dataclasses import dataclass

from sdvsr.errors import ArgumentError, DimensionError
from sdvsr.tensor.tensor4 import Tensor4


@dataclass(frozen=True)
class SequenceSample:
    """One clip: HR frames, their LR counterparts and a name.

    Frames are (1, 3, h, w) tensors with values in [0, 1]; LR sizes are the HR
    sizes divided by ``scale``.
    """

    name: str
    hr_frames: tuple[Tensor4, ...]
    lr_frames: tuple[Tensor4, ...]
    scale: int = 4

    def __post_init__(self) -> None:
        object.__setattr__(self, "hr_frames", tuple(self.hr_frames))
        object.__setattr__(self, "lr_frames", tuple(self.lr_frames))
        if not self.hr_frames:
            raise DimensionError(f"sequence {self.name!r} has no frames")
        if len(self.hr_frames) != len(self.lr_frames):
            raise DimensionError(
                f"sequence {self.name!r}: {len(self.hr_frames)} HR frames vs {len(self.lr_frames)} LR frames"
            )
        hr_shape = self.hr_frames[0].shape
        lr_shape = self.lr_frames[0].shape
        if hr_shape[:2] != (1, 3) or lr_shape[:2] != (1, 3):
            raise DimensionError(
                f"sequence {self.name!r}: frames must be (1, 3, h, w), got HR {hr_shape}, LR {lr_shape}"
            )
        if lr_shape[2] * self.scale != hr_shape[2] or lr_shape[3] * self.scale != hr_shape[3]:
            raise DimensionError(
                f"sequence {self.name!r}: LR {lr_shape} is not HR {hr_shape} divided by {self.scale}"
            )
        for kind, frames, shape in (("HR", self.hr_frames, hr_shape), ("LR", self.lr_frames, lr_shape)):
            for index, frame in enumerate(frames):
                if frame.shape != shape:
                    raise DimensionError(
                        f"sequence {self.name!r}: {kind} frame {index} has shape {frame.shape}, expected {shape}"
                    )
                data = frame.data
                if data.size and (data.min() < 0.0 or data.max() > 1.0):
                    raise ArgumentError(
                        f"sequence {self.name!r}: {kind} frame {index} leaves the [0, 1] range"
                    )

    @property
    def frame_count(self) -> int:
        return len(self.hr_frames)

    @property
    def hr_size(self) -> tuple[int, int]:
        return self.hr_frames[0].h, self.hr_frames[0].w

    @property
    def lr_size(self) -> tuple[int, int]:
        return self.lr_frames[0].h, self.lr_frames[0].w
