"""Training loop: clip sampling, BPTT and Adam with the step schedule."""
from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sdvsr.autograd.tape import Tape
from sdvsr.console import print_debug
from sdvsr.data.dataset import SequenceDataset
from sdvsr.errors import ArgumentError, NumericAbortError, UsageError
from sdvsr.metrics.evaluate import DEFAULT_BORDER_CROP, evaluate
from sdvsr.model.rsdn import RSDN
from sdvsr.tensor.tensor4 import Tensor4
from sdvsr.training.checkpoint import Checkpoint, save_checkpoint
from sdvsr.training.losses import LossBreakdown, LossWeights, hr_targets, tape_loss
from sdvsr.training.optim import OptimState, StepSchedule, adam_step

logger = logging.getLogger(__name__)

METRICS_LOG = "metrics.log"
CKPT_LAST = "ckpt_last"
CKPT_FINAL = "ckpt_final"
METRICS_HEADER = "iter,epoch,lr,loss,psnr_val"

ProgressCallback = Callable[[int, int, float], None]


@dataclass(frozen=True)
class TrainHyper:
    """Loop settings. Full-size runs use patch 256, batch 16 and clips of 7."""

    epochs: int = 70
    iterations_per_epoch: int = 10
    max_iterations: int | None = None
    batch: int = 4
    patch: int = 64
    clip_len: int = 3
    base_lr: float = 1e-4
    decay: float = 0.1
    decay_every: int = 60
    seed: int = 0
    val_every: int = 50
    checkpoint_every: int = 100
    border_crop: int = DEFAULT_BORDER_CROP
    augment: bool = True

    def __post_init__(self) -> None:
        for name in ("epochs", "iterations_per_epoch", "batch", "patch", "clip_len", "decay_every"):
            if getattr(self, name) < 1:
                raise ArgumentError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ArgumentError(f"max_iterations must be positive, got {self.max_iterations}")

    @property
    def schedule(self) -> StepSchedule:
        return StepSchedule(self.base_lr, self.decay, self.decay_every, self.epochs)

    @property
    def total_iterations(self) -> int:
        planned = self.epochs * self.iterations_per_epoch
        return min(planned, self.max_iterations) if self.max_iterations else planned


@dataclass(frozen=True)
class Augmentation:
    flip_h: bool = False
    flip_v: bool = False
    rot90: int = 0

    @classmethod
    def draw(cls, rng: np.random.Generator) -> Augmentation:
        flip_h, flip_v = (bool(b) for b in rng.integers(0, 2, size=2))
        return cls(flip_h, flip_v, int(rng.integers(0, 4)))

    def apply(self, array: np.ndarray) -> np.ndarray:
        if self.flip_h:
            array = array[..., :, ::-1]
        if self.flip_v:
            array = array[..., ::-1, :]
        if self.rot90:
            array = np.rot90(array, k=self.rot90, axes=(-2, -1))
        return np.ascontiguousarray(array)


@dataclass(frozen=True)
class ClipBatch:
    """Per time step, a (batch, 3, h, w) LR tensor and its HR counterpart."""

    lr_frames: list[Tensor4]
    hr_frames: list[Tensor4]


class ClipSampler:
    """Random temporal windows and r-aligned spatial crops, augmented per clip."""

    def __init__(self, dataset: SequenceDataset, hyper: TrainHyper) -> None:
        if len(dataset) == 0:
            raise UsageError("training dataset is empty")
        self.dataset = dataset
        self.scale = dataset.scale
        self.clip_len = min(hyper.clip_len, dataset.min_frames)
        self.patch = hyper.patch
        self.augment = hyper.augment
        if self.patch % self.scale != 0:
            raise ArgumentError(f"patch {self.patch} is not a multiple of scale {self.scale}")
        smallest = min(min(s.hr_size) for s in dataset)
        if self.patch > smallest:
            raise ArgumentError(f"patch {self.patch} is larger than the smallest frame side {smallest}")

    def _clip(self, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        sample = self.dataset[int(rng.integers(len(self.dataset)))]
        start = int(rng.integers(sample.frame_count - self.clip_len + 1))
        r = self.scale
        lr_patch = self.patch // r
        lr_h, lr_w = sample.lr_size
        top = int(rng.integers(lr_h - lr_patch + 1))
        left = int(rng.integers(lr_w - lr_patch + 1))
        window = range(start, start + self.clip_len)
        lr = np.stack(
            [sample.lr_frames[t].data[0, :, top : top + lr_patch, left : left + lr_patch] for t in window]
        )
        hr = np.stack(
            [
                sample.hr_frames[t].data[0, :, top * r : (top + lr_patch) * r, left * r : (left + lr_patch) * r]
                for t in window
            ]
        )
        if self.augment:
            aug = Augmentation.draw(rng)
            lr, hr = aug.apply(lr), aug.apply(hr)
        return lr, hr

    def sample(self, rng: np.random.Generator, batch: int) -> ClipBatch:
        clips = [self._clip(rng) for _ in range(batch)]
        lr = np.stack([c[0] for c in clips], axis=1)
        hr = np.stack([c[1] for c in clips], axis=1)
        return ClipBatch(
            lr_frames=[Tensor4.wrap(np.ascontiguousarray(step)) for step in lr],
            hr_frames=[Tensor4.wrap(np.ascontiguousarray(step)) for step in hr],
        )


@dataclass(frozen=True)
class TrainResult:
    iterations: int
    losses: tuple[float, ...]
    breakdowns: tuple[LossBreakdown, ...]
    val_psnr: tuple[tuple[int, float], ...]
    checkpoint: Path | None
    metrics_log: Path | None
    model: RSDN = field(repr=False)

    @property
    def final_loss(self) -> float:
        return self.losses[-1]


class Trainer:
    """Fits an :class:`RSDN` to clips from a :class:`SequenceDataset`."""

    def __init__(
        self,
        model: RSDN,
        weights: LossWeights | None = None,
        hyper: TrainHyper | None = None,
        *,
        out_dir: str | Path | None = None,
        progress_callback: ProgressCallback | None = None,
        debug: bool = False,
    ) -> None:
        self.model = model
        self.weights = weights or LossWeights()
        self.hyper = hyper or TrainHyper()
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.progress_callback = progress_callback
        self.debug = debug
        self.optim = OptimState.for_params(model.params)
        self.iteration = 0

    def _checkpoint(self, name: str, epoch: int) -> Path | None:
        if self.out_dir is None:
            return None
        checkpoint = Checkpoint(
            model=self.model,
            step=self.iteration,
            optim=self.optim,
            meta={"epoch": epoch, "weights": list(self.weights.as_tuple()), "epsilon": self.weights.epsilon},
        )
        return save_checkpoint(self.out_dir / name, checkpoint)

    def _log_line(self, line: str) -> None:
        if self.out_dir is None:
            return
        with open(self.out_dir / METRICS_LOG, "a", encoding="utf-8") as handle:
            handle.write(line + "\n")

    def validate(self, val: SequenceDataset) -> float:
        report = evaluate(self.model, val, self.hyper.border_crop)
        return report.mean().psnr_y

    def train_step(self, batch: ClipBatch, lr: float) -> LossBreakdown:
        """Forward the clip, backpropagate through every step, apply Adam."""
        config = self.model.config
        tape = Tape()
        steps = self.model.unroll(tape, batch.lr_frames)
        targets = [
            hr_targets(frame, config.scale, method=config.decomposition, sigma=config.lowpass_sigma)
            for frame in batch.hr_frames
        ]
        loss, breakdown = tape_loss(tape, steps, targets, self.weights)
        if not math.isfinite(breakdown.total):
            raise NumericAbortError(f"loss became {breakdown.total} at iteration {self.iteration + 1}")
        grads = tape.backward(loss).parameters()
        adam_step(self.model.params, grads, self.optim, lr)
        return breakdown

    def run(self, train: SequenceDataset, val: SequenceDataset | None = None) -> TrainResult:
        hyper = self.hyper
        sampler = ClipSampler(train, hyper)
        rng = np.random.default_rng(hyper.seed)
        schedule = hyper.schedule
        total = hyper.total_iterations
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            (self.out_dir / METRICS_LOG).write_text(METRICS_HEADER + "\n", encoding="utf-8")
        if self.debug:
            print_debug("Training Setup", {"model": self.model.config.to_dict(), "hyper": hyper.__dict__}, is_yaml=True)
        logger.info(
            "training %s (%d params) for %d iterations", self.model.config.label, self.model.param_count, total
        )

        losses: list[float] = []
        breakdowns: list[LossBreakdown] = []
        val_psnr: list[tuple[int, float]] = []
        epoch = 0
        for epoch in range(hyper.epochs):
            if self.iteration >= total:
                break
            lr = schedule.lr(epoch)
            for _ in range(hyper.iterations_per_epoch):
                if self.iteration >= total:
                    break
                batch = sampler.sample(rng, hyper.batch)
                try:
                    breakdown = self.train_step(batch, lr)
                except NumericAbortError:
                    # parameters are still those of the last finite step
                    self._checkpoint(CKPT_LAST, epoch)
                    raise
                self.iteration += 1
                losses.append(breakdown.total)
                breakdowns.append(breakdown)

                psnr_text = ""
                if val is not None and len(val) and (self.iteration % hyper.val_every == 0 or self.iteration == total):
                    score = self.validate(val)
                    val_psnr.append((self.iteration, score))
                    psnr_text = f"{score:.6f}"
                self._log_line(f"{self.iteration},{epoch},{lr:.6g},{breakdown.total:.8f},{psnr_text}")
                if self.iteration % hyper.checkpoint_every == 0:
                    self._checkpoint(CKPT_LAST, epoch)
                if self.progress_callback:
                    self.progress_callback(self.iteration, total, breakdown.total)
                logger.debug("iter %d loss %.6f", self.iteration, breakdown.total)

        final = self._checkpoint(CKPT_FINAL, epoch)
        return TrainResult(
            iterations=self.iteration,
            losses=tuple(losses),
            breakdowns=tuple(breakdowns),
            val_psnr=tuple(val_psnr),
            checkpoint=final,
            metrics_log=self.out_dir / METRICS_LOG if self.out_dir else None,
            model=self.model,
        )


def train(
    model: RSDN,
    dataset: SequenceDataset,
    weights: LossWeights | None = None,
    hyper: TrainHyper | None = None,
    *,
    val: SequenceDataset | None = None,
    out_dir: str | Path | None = None,
) -> TrainResult:
    return Trainer(model, weights, hyper, out_dir=out_dir).run(dataset, val)
