"""Run configuration for sdvsr commands."""
from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from sdvsr.data.degrade import DecimationMode
from sdvsr.errors import FormatError, SdvsrError, UsageError
from sdvsr.model.config import ModelConfig
from sdvsr.training.losses import LossWeights
from sdvsr.training.trainer import TrainHyper

MODEL_DEFAULTS: dict[str, Any] = {
    "variant": "sd",
    "input_mode": "sd",
    "hsa": "on",
    "blocks": 2,
    "channels": 16,
    "scale": 4,
    "hsa_kernel": 3,
    "decomposition": "bicubic",
}

LOOP_DEFAULTS: dict[str, Any] = {
    "alpha": 1.0,
    "beta": 1.0,
    "gamma": 1.0,
    "epsilon": 1e-3,
    "epochs": 70,
    "iterations_per_epoch": 10,
    "max_iterations": None,
    "batch": 4,
    "patch": 64,
    "clip_len": 3,
    "lr": 1e-4,
    "seed": 0,
    "val_fraction": 0.1,
    "val_every": 50,
    "checkpoint_every": 100,
    "crop": 8,
    "sigma": 1.6,
    "degrade_mode": "strided",
}

DEFAULTS: dict[str, dict[str, Any]] = {
    "train": {**MODEL_DEFAULTS, **LOOP_DEFAULTS, "data": None, "out": "runs/train"},
    "infer": {"ckpt": None, "in_dir": None, "out_dir": None, "dump_hidden": 0, "profile_row": None},
    "eval": {
        "ckpt": None,
        "data": None,
        "crop": 8,
        "report": None,
        "timing": False,
        "scale": 4,
        "sigma": 1.6,
        "degrade_mode": "strided",
        "out": "runs/eval",
    },
    "ablate": {
        **MODEL_DEFAULTS,
        **LOOP_DEFAULTS,
        "grid": "table1",
        "data": None,
        "budget_iters": 50,
        "seeds": 1,
        "out": "runs/ablate",
    },
    "synth": {
        "kind": "moving_bars",
        "frames": 4,
        "size": 64,
        "velocity": 1.0,
        "seed": 0,
        "count": 1,
        "scale": 4,
        "sigma": 1.6,
        "degrade_mode": "strided",
        "out": "data/synth",
    },
    "degrade": {"in_dir": None, "out_dir": None, "sigma": 1.6, "scale": 4, "mode": "strided"},
}


def _normalize_key(key: str) -> str:
    return key.strip().replace("-", "_")


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one command invocation."""

    subcommand: str
    config_path: Path | None
    overrides: tuple[str, ...]
    seed: int | None
    out_dir: Path | None
    values: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)


class ConfigManager:
    """Loads config files, applies overrides and writes resolved snapshots."""

    SNAPSHOT_NAME = "config.resolved"

    @classmethod
    def load_file(cls, path: str | Path | None) -> dict[str, Any]:
        """Read a flat YAML mapping of ``key: value`` lines."""
        if path is None:
            return {}
        path = Path(path)
        try:
            with open(path, encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except OSError as exc:
            raise UsageError(f"cannot read config file {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise FormatError(f"config file {path} is not valid YAML: {exc}") from exc
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise UsageError(f"config file {path} must hold a mapping of key: value lines")
        result: dict[str, Any] = {}
        for key, value in data.items():
            if isinstance(value, (dict, list)):
                raise UsageError(f"config key {key!r} in {path} must be a scalar")
            result[_normalize_key(str(key))] = value
        return result

    @classmethod
    def parse_overrides(cls, items: Iterable[str]) -> dict[str, Any]:
        """Turn ``["key=value", ...]`` into typed values."""
        result: dict[str, Any] = {}
        for item in items:
            key, sep, raw = item.partition("=")
            if not sep or not key.strip():
                raise UsageError(f"override {item!r} is not of the form key=value")
            try:
                value = yaml.safe_load(raw) if raw.strip() else None
            except yaml.YAMLError as exc:
                raise UsageError(f"override {item!r} has an unparsable value: {exc}") from exc
            result[_normalize_key(key)] = value
        return result

    @classmethod
    def resolve(
        cls,
        defaults: Mapping[str, Any],
        file_values: Mapping[str, Any],
        flags: Mapping[str, Any],
        overrides: Mapping[str, Any],
    ) -> dict[str, Any]:
        """Merge with precedence defaults < file < flags < overrides.

        Flags left at ``None`` count as not given.
        """
        resolved = dict(defaults)
        for source, values in (("config file", file_values), ("--set", overrides)):
            unknown = sorted(set(values) - set(defaults))
            if unknown:
                raise UsageError(f"unknown {source} keys: {', '.join(unknown)}")
        resolved.update(file_values)
        resolved.update({k: v for k, v in flags.items() if v is not None})
        resolved.update(overrides)
        return resolved

    @classmethod
    def write_snapshot(cls, values: Mapping[str, Any], out_dir: str | Path) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / cls.SNAPSHOT_NAME
        plain = {k: str(v) if isinstance(v, Path) else v for k, v in values.items()}
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(plain, f, default_flow_style=False, sort_keys=True)
        return path

    @classmethod
    def build(
        cls,
        subcommand: str,
        config_path: str | Path | None = None,
        flags: Mapping[str, Any] | None = None,
        overrides: Iterable[str] = (),
    ) -> RunConfig:
        """Resolve ``subcommand`` settings from defaults, file, flags and ``--set`` items."""
        if subcommand not in DEFAULTS:
            raise UsageError(f"unknown subcommand {subcommand!r}")
        overrides = tuple(overrides)
        values = cls.resolve(
            DEFAULTS[subcommand],
            cls.load_file(config_path),
            flags or {},
            cls.parse_overrides(overrides),
        )
        out = values.get("out") or values.get("out_dir")
        seed = values.get("seed")
        with _settings(subcommand):
            seed = int(seed) if seed is not None else None
        return RunConfig(
            subcommand=subcommand,
            config_path=Path(config_path) if config_path else None,
            overrides=overrides,
            seed=seed,
            out_dir=Path(out) if out else None,
            values=values,
        )


@contextmanager
def _settings(group: str) -> Iterator[None]:
    """Report malformed values of a settings group as usage errors."""
    try:
        yield
    except SdvsrError:
        raise
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid {group} settings: {exc}") from exc


def _toggle(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("on", "true", "yes", "1"):
        return True
    if text in ("off", "false", "no", "0"):
        return False
    raise UsageError(f"expected on/off, got {value!r}")


def require(values: Mapping[str, Any], *keys: str) -> None:
    missing = [key for key in keys if values.get(key) in (None, "")]
    if missing:
        raise UsageError("missing required settings: " + ", ".join(f"--{k.replace('_', '-')}" for k in missing))


def model_config_from(values: Mapping[str, Any]) -> ModelConfig:
    with _settings("model"):
        return ModelConfig(
            blocks=int(values["blocks"]),
            channels=int(values["channels"]),
            scale=int(values["scale"]),
            hsa_kernel=int(values["hsa_kernel"]),
            block_variant=str(values["variant"]),
            hsa_enabled=_toggle(values["hsa"]),
            input_mode=str(values["input_mode"]),
            decomposition=str(values["decomposition"]),
        )


def loss_weights_from(values: Mapping[str, Any]) -> LossWeights:
    with _settings("loss"):
        return LossWeights(
            alpha=float(values["alpha"]),
            beta=float(values["beta"]),
            gamma=float(values["gamma"]),
            epsilon=float(values["epsilon"]),
        )


def train_hyper_from(values: Mapping[str, Any]) -> TrainHyper:
    max_iterations = values.get("max_iterations")
    with _settings("training"):
        return TrainHyper(
            epochs=int(values["epochs"]),
            iterations_per_epoch=int(values["iterations_per_epoch"]),
            max_iterations=int(max_iterations) if max_iterations is not None else None,
            batch=int(values["batch"]),
            patch=int(values["patch"]),
            clip_len=int(values["clip_len"]),
            base_lr=float(values["lr"]),
            seed=int(values["seed"]),
            val_every=int(values["val_every"]),
            checkpoint_every=int(values["checkpoint_every"]),
            border_crop=int(values["crop"]),
        )


def degrade_mode_from(values: Mapping[str, Any]) -> DecimationMode:
    """Decimation used when LR frames are derived from HR ones."""
    value = values.get("degrade_mode", DecimationMode.STRIDED.value)
    try:
        return DecimationMode(str(value))
    except ValueError as exc:
        choices = "|".join(mode.value for mode in DecimationMode)
        raise UsageError(f"degrade_mode must be one of {choices}, got {value!r}") from exc
