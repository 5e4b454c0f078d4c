"""Architecture configuration for the recurrent structure-detail network."""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from enum import Enum
from typing import Any

from sdvsr.errors import ArgumentError


class BlockVariant(str, Enum):
    """Residual block wiring inside the recurrent cell."""

    ONE_STREAM = "one_stream"
    TWO_STREAM = "two_stream"
    SD = "sd"


class InputMode(str, Enum):
    """What the branch heads consume: whole frames or their S/D components."""

    IMAGE = "image"
    STRUCTURE_DETAIL = "sd"


class Decomposition(str, Enum):
    BICUBIC = "bicubic"
    LOWPASS = "lowpass"


@dataclass(frozen=True)
class ModelConfig:
    """Hyper-parameters that fix the network's layer shapes.

    ``channels`` is the base width. One-stream models run at twice that width
    so their parameter budget matches the two-branch variants.
    """

    blocks: int = 2
    channels: int = 16
    scale: int = 4
    hsa_kernel: int = 3
    block_variant: BlockVariant = BlockVariant.SD
    hsa_enabled: bool = True
    input_mode: InputMode = InputMode.STRUCTURE_DETAIL
    decomposition: Decomposition = Decomposition.BICUBIC
    lowpass_sigma: float = 1.6

    def __post_init__(self) -> None:
        object.__setattr__(self, "block_variant", BlockVariant(self.block_variant))
        object.__setattr__(self, "input_mode", InputMode(self.input_mode))
        object.__setattr__(self, "decomposition", Decomposition(self.decomposition))
        if self.blocks < 1:
            raise ArgumentError(f"blocks must be positive, got {self.blocks}")
        if self.channels < 1:
            raise ArgumentError(f"channels must be positive, got {self.channels}")
        if self.scale < 1:
            raise ArgumentError(f"scale must be positive, got {self.scale}")
        if self.hsa_kernel < 1 or self.hsa_kernel % 2 == 0:
            raise ArgumentError(f"hsa_kernel must be odd, got {self.hsa_kernel}")
        if not self.lowpass_sigma > 0:
            raise ArgumentError(f"lowpass_sigma must be positive, got {self.lowpass_sigma}")
        if self.one_stream and self.input_mode is not InputMode.IMAGE:
            raise ArgumentError("one_stream blocks consume whole frames; use input_mode=image")

    @property
    def one_stream(self) -> bool:
        return self.block_variant is BlockVariant.ONE_STREAM

    @property
    def width(self) -> int:
        """Feature channels actually carried by the cell."""
        return 2 * self.channels if self.one_stream else self.channels

    @property
    def head_in_channels(self) -> int:
        """Previous frame + current frame + unshuffled HR estimate + hidden."""
        return 3 + 3 + 3 * self.scale * self.scale + self.width

    @property
    def label(self) -> str:
        hsa = "hsa" if self.hsa_enabled else "nohsa"
        return f"{self.block_variant.value}-{self.input_mode.value}-{hsa} {self.blocks}-{self.width}"

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, Enum):
                data[key] = value.value
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ModelConfig:
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    def evolve(self, **changes: Any) -> ModelConfig:
        return replace(self, **changes)


def architecture_grid(channels: int = 16, blocks: int = 2, scale: int = 4) -> list[tuple[int, ModelConfig]]:
    """The eight architecture ablation models, numbered 1 to 8."""
    image, sd = InputMode.IMAGE, InputMode.STRUCTURE_DETAIL
    grid = [
        (BlockVariant.ONE_STREAM, False, image),
        (BlockVariant.ONE_STREAM, True, image),
        (BlockVariant.TWO_STREAM, True, image),
        (BlockVariant.TWO_STREAM, False, sd),
        (BlockVariant.TWO_STREAM, True, sd),
        (BlockVariant.SD, True, image),
        (BlockVariant.SD, False, sd),
        (BlockVariant.SD, True, sd),
    ]
    return [
        (
            number,
            ModelConfig(
                blocks=blocks,
                channels=channels,
                scale=scale,
                block_variant=variant,
                hsa_enabled=hsa,
                input_mode=mode,
            ),
        )
        for number, (variant, hsa, mode) in enumerate(grid, start=1)
    ]
