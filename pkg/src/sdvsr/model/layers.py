"""Convolution layer inventory and parameter initialization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sdvsr.model.config import BlockVariant, ModelConfig


@dataclass(frozen=True)
class ConvSpec:
    """One k×k convolution of the network, stored as ``<name>.weight``/``<name>.bias``."""

    name: str
    in_c: int
    out_c: int
    kernel: int = 3

    @property
    def weight_name(self) -> str:
        return f"{self.name}.weight"

    @property
    def bias_name(self) -> str:
        return f"{self.name}.bias"

    @property
    def weight_shape(self) -> tuple[int, int, int, int]:
        return (self.out_c, self.in_c, self.kernel, self.kernel)

    @property
    def bias_shape(self) -> tuple[int, int, int, int]:
        return (1, self.out_c, 1, 1)

    @property
    def fan_in(self) -> int:
        return self.in_c * self.kernel * self.kernel

    @property
    def param_count(self) -> int:
        return self.out_c * self.fan_in + self.out_c

    def macs(self, h: int, w: int) -> int:
        return self.out_c * self.fan_in * h * w


def block_specs(config: ModelConfig, index: int) -> list[ConvSpec]:
    c = config.width
    prefix = f"blocks.{index}"
    if config.block_variant is BlockVariant.ONE_STREAM:
        names = ("conv1", "conv2")
    else:
        names = ("s1", "s2", "d1", "d2")
    return [ConvSpec(f"{prefix}.{name}", c, c) for name in names]


def layer_specs(config: ModelConfig) -> list[ConvSpec]:
    """Every convolution of ``config`` in a fixed, name-stable order."""
    c = config.width
    k = config.hsa_kernel
    hr_channels = 3 * config.scale * config.scale
    specs: list[ConvSpec] = []
    if config.hsa_enabled:
        specs.append(ConvSpec("hsa.filter", 3, k * k))
    if config.one_stream:
        specs.append(ConvSpec("head", config.head_in_channels, c))
    else:
        specs.append(ConvSpec("head.s", config.head_in_channels, c))
        specs.append(ConvSpec("head.d", config.head_in_channels, c))
    for index in range(config.blocks):
        specs.extend(block_specs(config, index))
    if config.one_stream:
        specs.append(ConvSpec("tail", c, hr_channels))
        specs.append(ConvSpec("fuse", c, c))
    else:
        specs.append(ConvSpec("tail.s", c, hr_channels))
        specs.append(ConvSpec("tail.d", c, hr_channels))
        specs.append(ConvSpec("fuse", 2 * c, c))
    return specs


def parameter_shapes(config: ModelConfig) -> dict[str, tuple[int, int, int, int]]:
    shapes: dict[str, tuple[int, int, int, int]] = {}
    for spec in layer_specs(config):
        shapes[spec.weight_name] = spec.weight_shape
        shapes[spec.bias_name] = spec.bias_shape
    return shapes


def init_params(
    config: ModelConfig, rng: np.random.Generator, dtype: np.dtype | type = np.float32
) -> dict[str, np.ndarray]:
    """Kaiming-uniform weights (bound sqrt(6 / fan_in)) and zero biases."""
    params: dict[str, np.ndarray] = {}
    for spec in layer_specs(config):
        bound = np.sqrt(6.0 / spec.fan_in)
        params[spec.weight_name] = rng.uniform(-bound, bound, size=spec.weight_shape).astype(dtype)
        params[spec.bias_name] = np.zeros(spec.bias_shape, dtype=dtype)
    return params
