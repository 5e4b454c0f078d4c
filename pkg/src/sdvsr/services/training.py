"""Training service behind ``sdvsr train``."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from sdvsr.config import (
    ConfigManager,
    RunConfig,
    degrade_mode_from,
    loss_weights_from,
    model_config_from,
    require,
    train_hyper_from,
)
from sdvsr.console import print_debug
from sdvsr.data.dataset import SequenceDataset
from sdvsr.model.rsdn import RSDN
from sdvsr.training.trainer import ProgressCallback, Trainer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingResult:
    """Result of a training run."""

    out_dir: Path
    label: str
    param_count: int
    iterations: int
    initial_loss: float
    final_loss: float
    val_psnr: float | None
    checkpoint: Path
    metrics_log: Path
    snapshot: Path


class TrainingService:
    """Service for training one RSDN configuration from a resolved run config."""

    def __init__(self, debug: bool = False, progress_callback: ProgressCallback | None = None) -> None:
        self._debug = debug
        self._progress_callback = progress_callback

    def run(self, config: RunConfig) -> TrainingResult:
        """
        Train on ``config['data']`` and write artifacts under ``config.out_dir``.

        Raises:
            UsageError: If required settings are missing or the dataset is empty
            FormatError: If the dataset cannot be read
            NumericAbortError: If the loss or a gradient stops being finite
        """
        values = config.values
        require(values, "data", "out")
        model_config = model_config_from(values)
        weights = loss_weights_from(values)
        hyper = train_hyper_from(values)
        out_dir = Path(values["out"])

        snapshot = ConfigManager.write_snapshot(values, out_dir)
        if self._debug:
            print_debug("Resolved configuration", values, is_yaml=True)

        dataset = SequenceDataset.from_path(
            values["data"], model_config.scale, float(values["sigma"]), degrade_mode_from(values)
        )
        train_set, val_set = dataset.split(float(values["val_fraction"]), hyper.seed)
        logger.info("%d training / %d validation sequences", len(train_set), len(val_set))

        model = RSDN.from_seed(model_config, hyper.seed)
        trainer = Trainer(
            model,
            weights,
            hyper,
            out_dir=out_dir,
            progress_callback=self._progress_callback,
            debug=self._debug,
        )
        result = trainer.run(train_set, val_set if len(val_set) else None)

        assert result.checkpoint is not None and result.metrics_log is not None
        return TrainingResult(
            out_dir=out_dir,
            label=model_config.label,
            param_count=model.param_count,
            iterations=result.iterations,
            initial_loss=result.losses[0],
            final_loss=result.final_loss,
            val_psnr=result.val_psnr[-1][1] if result.val_psnr else None,
            checkpoint=result.checkpoint,
            metrics_log=result.metrics_log,
            snapshot=snapshot,
        )
