"""Recurrent structure-detail super-resolution network."""
from sdvsr.model.blocks import ParameterScope, hsa, residual_block, sd_block
from sdvsr.model.complexity import mac_estimate, param_count, per_block_params
from sdvsr.model.config import (
    BlockVariant,
    Decomposition,
    InputMode,
    ModelConfig,
    architecture_grid,
)
from sdvsr.model.decompose import decompose
from sdvsr.model.layers import ConvSpec, init_params, layer_specs, parameter_shapes
from sdvsr.model.rsdn import (
    RSDN,
    CellOutput,
    RecurrentState,
    TapeState,
    TapeStep,
    frame_pairs,
)

__all__ = [
    "RSDN",
    "BlockVariant",
    "CellOutput",
    "ConvSpec",
    "Decomposition",
    "InputMode",
    "ModelConfig",
    "ParameterScope",
    "RecurrentState",
    "TapeState",
    "TapeStep",
    "decompose",
    "frame_pairs",
    "hsa",
    "init_params",
    "layer_specs",
    "mac_estimate",
    "param_count",
    "parameter_shapes",
    "per_block_params",
    "residual_block",
    "sd_block",
    "architecture_grid",
]
