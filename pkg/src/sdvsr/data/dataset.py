"""Collections of sequences, manifests and train/validation splits."""
from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Sequence
from pathlib import Path

import numpy as np

from sdvsr.data.degrade import DEFAULT_SCALE, DEFAULT_SIGMA, DecimationMode
from sdvsr.data.frames_io import HR_DIR, load_sequence
from sdvsr.data.sequence import SequenceSample
from sdvsr.errors import ArgumentError, FormatError, UsageError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.txt"


def read_manifest(path: str | Path) -> list[Path]:
    """Sequence directories listed in ``path``, resolved against its folder.

    Blank lines and ``#`` comments are skipped.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read manifest {path}: {exc}") from exc
    entries = [line.strip() for line in lines]
    return [path.parent / entry for entry in entries if entry and not entry.startswith("#")]


def write_manifest(path: str | Path, entries: Iterable[str | Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{entry}\n" for entry in entries), encoding="utf-8")
    return path


class SequenceDataset(Sequence[SequenceSample]):
    """An ordered, in-memory list of :class:`SequenceSample` clips."""

    def __init__(self, samples: Iterable[SequenceSample]) -> None:
        self.samples = list(samples)
        scales = {sample.scale for sample in self.samples}
        if len(scales) > 1:
            raise UsageError(f"dataset mixes scale factors {sorted(scales)}")

    @classmethod
    def from_manifest(
        cls,
        path: str | Path,
        scale: int = DEFAULT_SCALE,
        sigma: float = DEFAULT_SIGMA,
        mode: DecimationMode | str = DecimationMode.STRIDED,
    ) -> SequenceDataset:
        directories = read_manifest(path)
        logger.debug("loading %d sequences from %s", len(directories), path)
        return cls(load_sequence(d, scale, sigma, mode) for d in directories)

    @classmethod
    def from_path(
        cls,
        path: str | Path,
        scale: int = DEFAULT_SCALE,
        sigma: float = DEFAULT_SIGMA,
        mode: DecimationMode | str = DecimationMode.STRIDED,
    ) -> SequenceDataset:
        """Load a manifest file, a directory with a manifest, a single sequence, or a folder of sequences."""
        path = Path(path)
        if path.is_file():
            return cls.from_manifest(path, scale, sigma, mode)
        if not path.is_dir():
            raise FormatError(f"dataset path {path} does not exist")
        if (path / MANIFEST_NAME).is_file():
            return cls.from_manifest(path / MANIFEST_NAME, scale, sigma, mode)
        if (path / HR_DIR).is_dir():
            return cls([load_sequence(path, scale, sigma, mode)])
        children = sorted(p for p in path.iterdir() if (p / HR_DIR).is_dir())
        if not children:
            raise FormatError(f"{path} holds no sequence directories")
        return cls(load_sequence(d, scale, sigma, mode) for d in children)

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, index):  # type: ignore[override]
        if isinstance(index, slice):
            return SequenceDataset(self.samples[index])
        return self.samples[index]

    def __iter__(self) -> Iterator[SequenceSample]:
        return iter(self.samples)

    @property
    def scale(self) -> int:
        return self.samples[0].scale if self.samples else DEFAULT_SCALE

    @property
    def names(self) -> list[str]:
        return [sample.name for sample in self.samples]

    @property
    def min_frames(self) -> int:
        return min((s.frame_count for s in self.samples), default=0)

    def split(self, val_fraction: float, seed: int = 0) -> tuple[SequenceDataset, SequenceDataset]:
        return split(self, val_fraction, seed)


def split(
    dataset: SequenceDataset, val_fraction: float, seed: int = 0
) -> tuple[SequenceDataset, SequenceDataset]:
    """Disjoint train/validation subsets, deterministic under ``seed``.

    Both keep the dataset's original order. A positive fraction always puts at
    least one sequence in validation when there are two or more.
    """
    if not 0.0 <= val_fraction < 1.0:
        raise ArgumentError(f"val_fraction must be in [0, 1), got {val_fraction}")
    count = len(dataset)
    n_val = int(round(count * val_fraction))
    if val_fraction > 0 and count >= 2:
        n_val = min(max(n_val, 1), count - 1)
    chosen = set(np.random.default_rng(seed).permutation(count)[:n_val].tolist())
    train = [s for i, s in enumerate(dataset.samples) if i not in chosen]
    val = [s for i, s in enumerate(dataset.samples) if i in chosen]
    return SequenceDataset(train), SequenceDataset(val)
