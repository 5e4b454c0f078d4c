"""Parameter and multiply-accumulate counts."""
from __future__ import annotations

from sdvsr.model.config import ModelConfig
from sdvsr.model.layers import block_specs, layer_specs


def param_count(config: ModelConfig) -> int:
    return sum(spec.param_count for spec in layer_specs(config))


def per_block_params(config: ModelConfig) -> int:
    return sum(spec.param_count for spec in block_specs(config, 0))


def mac_estimate(config: ModelConfig, h: int, w: int) -> int:
    """Convolution MACs of one recurrent step at LR size ``h``×``w``.

    Every convolution of the cell runs on the LR grid.
    """
    return sum(spec.macs(h, w) for spec in layer_specs(config))
