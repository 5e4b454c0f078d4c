"""Pytest configuration and fixtures."""
import pytest
from pathlib import Path
import tempfile
import shutil

import numpy as np

from sdvsr.data.dataset import SequenceDataset
from sdvsr.data.synth import synth_dataset, synth_sequence
from sdvsr.model.config import ModelConfig
from sdvsr.tensor.tensor4 import Tensor4


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests."""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path)


@pytest.fixture
def rng():
    """Seeded generator so every random input is reproducible."""
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config():
    """Smallest useful SD model: one block, four channels, x2."""
    return ModelConfig(blocks=1, channels=4, scale=2)


@pytest.fixture
def small_config():
    """Two blocks, eight channels, x4, as used for the full-cell gradient check."""
    return ModelConfig(blocks=2, channels=8, scale=4)


def _quantized(rng, h, w, n=1):
    values = rng.integers(0, 256, size=(n, 3, h, w)).astype(np.float32) / np.float32(255.0)
    return Tensor4.wrap(values)


@pytest.fixture
def make_frame(rng):
    """Factory of random frames on the 8-bit lattice, like frames read from PNG."""
    return lambda h, w, n=1: _quantized(rng, h, w, n)


@pytest.fixture
def lr_frames(rng):
    """Three random 8x8 LR frames."""
    return [_quantized(rng, 8, 8) for _ in range(3)]


@pytest.fixture
def bars_sample():
    """One moving-bars clip: four 32x32 HR frames with x4 LR counterparts."""
    return synth_sequence("moving_bars", 4, (32, 32), velocity=1.0, seed=7, scale=4)


@pytest.fixture
def bars_dataset():
    """Three moving-bars clips held in memory."""
    return SequenceDataset(
        synth_sequence("moving_bars", 4, (32, 32), velocity=1.0, seed=seed, scale=4, name=f"seq_{seed}")
        for seed in (1, 2, 3)
    )


@pytest.fixture
def bars_on_disk(temp_dir):
    """Three moving-bars clips written as PNG sequences with a manifest."""
    return synth_dataset(temp_dir / "bars", "moving_bars", 3, 3, (32, 32), 1.0, seed=5, scale=4)


@pytest.fixture
def sample_run_config():
    """Flat YAML settings file content for ``train``."""
    return """blocks: 1
channels: 4
hsa: off
batch: 1
patch: 16
clip-len: 2
max_iterations: 2
"""
