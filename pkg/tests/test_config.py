"""Tests for configuration management."""
from pathlib import Path

import pytest
import yaml

from sdvsr.config import (
    DEFAULTS,
    ConfigManager,
    degrade_mode_from,
    loss_weights_from,
    model_config_from,
    require,
    train_hyper_from,
)
from sdvsr.data.degrade import DecimationMode
from sdvsr.errors import ArgumentError, FormatError, UsageError
from sdvsr.model.config import BlockVariant


class TestConfigFile:
    """Test cases for reading YAML settings files."""

    def test_no_file_means_no_values(self):
        assert ConfigManager.load_file(None) == {}

    def test_empty_file(self, temp_dir):
        path = temp_dir / "empty.yaml"
        path.write_text("")
        assert ConfigManager.load_file(path) == {}

    def test_dashed_keys_are_normalized(self, temp_dir, sample_run_config):
        path = temp_dir / "run.yaml"
        path.write_text(sample_run_config)
        values = ConfigManager.load_file(path)
        assert values["clip_len"] == 2
        assert values["hsa"] is False

    def test_missing_file(self, temp_dir):
        with pytest.raises(UsageError):
            ConfigManager.load_file(temp_dir / "absent.yaml")

    def test_invalid_yaml(self, temp_dir):
        path = temp_dir / "bad.yaml"
        path.write_text("blocks: [1, 2\n")
        with pytest.raises(FormatError):
            ConfigManager.load_file(path)

    @pytest.mark.parametrize("content", ["- 1\n- 2\n", "blocks:\n  nested: 1\n"])
    def test_non_flat_content(self, temp_dir, content):
        path = temp_dir / "nested.yaml"
        path.write_text(content)
        with pytest.raises(UsageError):
            ConfigManager.load_file(path)


class TestOverrides:
    """Test cases for ``--set key=value`` parsing."""

    def test_values_are_typed(self):
        values = ConfigManager.parse_overrides(["blocks=4", "hsa=off", "clip-len=5", "data=clips/a", "report="])
        assert values == {"blocks": 4, "hsa": False, "clip_len": 5, "data": "clips/a", "report": None}

    def test_exponent_without_dot_still_converts(self):
        values = {**DEFAULTS["train"], **ConfigManager.parse_overrides(["lr=1e-3"])}
        assert train_hyper_from(values).base_lr == pytest.approx(1e-3)

    @pytest.mark.parametrize("item", ["blocks", "=4"])
    def test_malformed_items(self, item):
        with pytest.raises(UsageError):
            ConfigManager.parse_overrides([item])


class TestResolve:
    """Test cases for merging settings sources."""

    def test_precedence(self):
        defaults = {"a": 1, "b": 1, "c": 1, "d": 1}
        resolved = ConfigManager.resolve(defaults, {"b": 2, "c": 2, "d": 2}, {"c": 3, "d": 3}, {"d": 4})
        assert resolved == {"a": 1, "b": 2, "c": 3, "d": 4}

    def test_unset_flags_are_ignored(self):
        resolved = ConfigManager.resolve({"a": 1}, {"a": 2}, {"a": None}, {})
        assert resolved["a"] == 2

    @pytest.mark.parametrize("source", ["file", "overrides"])
    def test_unknown_keys(self, source):
        extra = {"blcoks": 3}
        file_values = extra if source == "file" else {}
        overrides = extra if source == "overrides" else {}
        with pytest.raises(UsageError, match="blcoks"):
            ConfigManager.resolve({"blocks": 2}, file_values, {}, overrides)

    def test_build_train(self, temp_dir, sample_run_config):
        path = temp_dir / "run.yaml"
        path.write_text(sample_run_config)
        config = ConfigManager.build("train", path, {"data": "clips", "blocks": None}, ["seed=5"])

        assert config.subcommand == "train"
        assert config.config_path == path
        assert config.seed == 5
        assert config.out_dir == Path("runs/train")
        assert config["blocks"] == 1
        assert config.get("data") == "clips"
        assert config.overrides == ("seed=5",)

    def test_build_unknown_subcommand(self):
        with pytest.raises(UsageError):
            ConfigManager.build("export")

    def test_bad_seed(self):
        with pytest.raises(UsageError):
            ConfigManager.build("train", overrides=["seed=abc"])

    def test_snapshot_is_sorted_yaml(self, temp_dir):
        path = ConfigManager.write_snapshot({"zeta": 1, "alpha": temp_dir / "x"}, temp_dir / "run")
        assert path.name == ConfigManager.SNAPSHOT_NAME
        assert path.read_text().splitlines()[0].startswith("alpha:")
        assert yaml.safe_load(path.read_text()) == {"alpha": str(temp_dir / "x"), "zeta": 1}


class TestSettingsGroups:
    """Test cases for turning resolved values into typed settings."""

    def test_model_config_from_file_values(self, temp_dir, sample_run_config):
        path = temp_dir / "run.yaml"
        path.write_text(sample_run_config)
        model = model_config_from(ConfigManager.build("train", path).values)
        assert (model.blocks, model.channels, model.scale) == (1, 4, 4)
        assert not model.hsa_enabled
        assert model.block_variant is BlockVariant.SD

    def test_malformed_number_is_a_usage_error(self):
        with pytest.raises(UsageError, match="invalid model settings"):
            model_config_from({**DEFAULTS["train"], "blocks": "many"})

    def test_invalid_toggle(self):
        with pytest.raises(UsageError, match="on/off"):
            model_config_from({**DEFAULTS["train"], "hsa": "sometimes"})

    def test_domain_errors_pass_through(self):
        with pytest.raises(ArgumentError):
            model_config_from({**DEFAULTS["train"], "channels": 0})
        with pytest.raises(ArgumentError):
            loss_weights_from({**DEFAULTS["train"], "alpha": -1})

    def test_train_hyper_defaults(self):
        hyper = train_hyper_from(DEFAULTS["train"])
        assert hyper.max_iterations is None
        assert hyper.border_crop == 8
        assert hyper.total_iterations == 700

    def test_require(self):
        require({"data": "x"}, "data")
        with pytest.raises(UsageError, match="--in-dir"):
            require({"in_dir": None, "ckpt": "c"}, "ckpt", "in_dir")

    @pytest.mark.parametrize("subcommand", ["train", "eval", "ablate", "synth"])
    def test_degrade_mode_defaults_to_strided(self, subcommand):
        values = ConfigManager.build(subcommand).values
        assert values["degrade_mode"] == "strided"
        assert degrade_mode_from(values) is DecimationMode.STRIDED

    def test_degrade_mode_override(self):
        values = ConfigManager.build("eval", overrides=["degrade_mode=bicubic"]).values
        assert degrade_mode_from(values) is DecimationMode.BICUBIC
        with pytest.raises(UsageError, match="degrade_mode"):
            degrade_mode_from({"degrade_mode": "box"})
