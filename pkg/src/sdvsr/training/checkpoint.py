"""Binary checkpoint format.

Layout (little-endian)::

    b"RSDN" | u32 version | u64 step | u32 n | n bytes of JSON config
    u32 entry count | entries

Each entry is ``u16 name length | name | u8 dtype tag | u8 ndim | ndim × u32
shape | payload``. Entries are ``param/<name>``, then ``adam.m/<name>`` and
``adam.v/<name>`` when optimizer state is present.
"""
from __future__ import annotations

import json
import logging
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from sdvsr.errors import FormatError, SdvsrError
from sdvsr.model.config import ModelConfig
from sdvsr.model.rsdn import RSDN
from sdvsr.training.optim import OptimState

logger = logging.getLogger(__name__)

MAGIC = b"RSDN"
VERSION = 1

DTYPE_TAGS = {np.dtype("<f4"): 1, np.dtype("<f8"): 2}
TAG_DTYPES = {tag: dtype for dtype, tag in DTYPE_TAGS.items()}


@dataclass
class Checkpoint:
    model: RSDN
    step: int = 0
    optim: OptimState | None = None
    meta: dict[str, Any] = field(default_factory=dict)


def _config_block(checkpoint: Checkpoint) -> bytes:
    block: dict[str, Any] = {"model": checkpoint.model.config.to_dict(), "meta": checkpoint.meta}
    if checkpoint.optim is not None:
        optim = checkpoint.optim
        block["optimizer"] = {
            "beta1": optim.beta1,
            "beta2": optim.beta2,
            "eps": optim.eps,
            "step": optim.step,
        }
    return json.dumps(block, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _entry(name: str, array: np.ndarray) -> bytes:
    data = np.ascontiguousarray(array, dtype=array.dtype.newbyteorder("<"))
    tag = DTYPE_TAGS.get(data.dtype)
    if tag is None:
        raise FormatError(f"cannot store {name} with dtype {array.dtype}")
    encoded = name.encode("utf-8")
    header = struct.pack("<H", len(encoded)) + encoded + struct.pack("<BB", tag, data.ndim)
    header += struct.pack(f"<{data.ndim}I", *data.shape)
    return header + data.tobytes()


def encode_checkpoint(checkpoint: Checkpoint) -> bytes:
    entries = [(f"param/{k}", v) for k, v in checkpoint.model.params.items()]
    if checkpoint.optim is not None:
        entries += [(f"adam.m/{k}", checkpoint.optim.m[k]) for k in checkpoint.model.params]
        entries += [(f"adam.v/{k}", checkpoint.optim.v[k]) for k in checkpoint.model.params]
    config = _config_block(checkpoint)
    parts = [
        MAGIC,
        struct.pack("<IQI", VERSION, checkpoint.step, len(config)),
        config,
        struct.pack("<I", len(entries)),
    ]
    parts.extend(_entry(name, array) for name, array in entries)
    return b"".join(parts)


def save_checkpoint(path: str | Path, checkpoint: Checkpoint) -> Path:
    """Write ``checkpoint`` atomically; an existing file is only replaced once the new one is complete."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(encode_checkpoint(checkpoint))
    os.replace(tmp, path)
    logger.debug("saved checkpoint %s (step %d)", path, checkpoint.step)
    return path


class _Reader:
    def __init__(self, data: bytes, source: str) -> None:
        self.data = data
        self.offset = 0
        self.source = source

    def take(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise FormatError(f"{self.source}: truncated at byte {self.offset} (needed {size} more)")
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, fmt: str) -> tuple[Any, ...]:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def decode_checkpoint(data: bytes, source: str = "<bytes>") -> Checkpoint:
    reader = _Reader(data, source)
    magic = reader.take(4)
    if magic != MAGIC:
        raise FormatError(f"{source}: bad magic {magic!r}, expected {MAGIC!r}")
    version, step, config_len = reader.unpack("<IQI")
    if version != VERSION:
        raise FormatError(f"{source}: unsupported checkpoint version {version}")
    try:
        block = json.loads(reader.take(config_len).decode("utf-8"))
        config = ModelConfig.from_dict(block["model"])
    except (ValueError, KeyError, TypeError, SdvsrError) as exc:
        raise FormatError(f"{source}: unreadable config block: {exc}") from exc

    (count,) = reader.unpack("<I")
    entries: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = reader.unpack("<H")
        name = reader.take(name_len).decode("utf-8")
        tag, ndim = reader.unpack("<BB")
        dtype = TAG_DTYPES.get(tag)
        if dtype is None:
            raise FormatError(f"{source}: entry {name} has unknown dtype tag {tag}")
        shape = reader.unpack(f"<{ndim}I")
        size = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
        array = np.frombuffer(reader.take(size), dtype=dtype).reshape(shape)
        entries[name] = array.astype(dtype.newbyteorder("="))
    if reader.offset != len(data):
        raise FormatError(f"{source}: {len(data) - reader.offset} trailing bytes")

    params = {k.removeprefix("param/"): v for k, v in entries.items() if k.startswith("param/")}
    try:
        model = RSDN(config, params)
    except SdvsrError as exc:
        raise FormatError(f"{source}: parameters do not match config: {exc}") from exc

    optim = None
    if "optimizer" in block:
        settings = block["optimizer"]
        try:
            optim = OptimState(
                m={k: entries[f"adam.m/{k}"] for k in model.params},
                v={k: entries[f"adam.v/{k}"] for k in model.params},
                step=int(settings["step"]),
                beta1=float(settings["beta1"]),
                beta2=float(settings["beta2"]),
                eps=float(settings["eps"]),
            )
        except KeyError as exc:
            raise FormatError(f"{source}: missing optimizer entry {exc}") from exc
    return Checkpoint(model=model, step=step, optim=optim, meta=dict(block.get("meta", {})))


def load_checkpoint(path: str | Path) -> Checkpoint:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read checkpoint {path}: {exc}") from exc
    return decode_checkpoint(data, str(path))
