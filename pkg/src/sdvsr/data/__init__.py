"""Frame sequences: I/O, degradation, synthesis and datasets."""
from sdvsr.data.dataset import SequenceDataset, read_manifest, split, write_manifest
from sdvsr.data.degrade import DecimationMode, degrade, degrade_frame
from sdvsr.data.frames_io import (
    load_frames,
    load_png,
    load_sequence,
    save_frames,
    save_png,
    save_sequence,
)
from sdvsr.data.sequence import SequenceSample
from sdvsr.data.synth import SynthKind, synth_dataset, synth_sequence

__all__ = [
    "DecimationMode",
    "SequenceDataset",
    "SequenceSample",
    "SynthKind",
    "degrade",
    "degrade_frame",
    "load_frames",
    "load_png",
    "load_sequence",
    "read_manifest",
    "save_frames",
    "save_png",
    "save_sequence",
    "split",
    "synth_dataset",
    "synth_sequence",
    "write_manifest",
]
