"""Objective, optimizer, checkpoints and the training loop."""
from sdvsr.training.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from sdvsr.training.losses import (
    HrTargets,
    LossBreakdown,
    LossWeights,
    charbonnier,
    hr_targets,
    tape_loss,
    total_loss,
)
from sdvsr.training.optim import Adam, OptimState, StepSchedule, adam_step, lr_schedule
from sdvsr.training.trainer import ClipSampler, Trainer, TrainHyper, TrainResult, train

__all__ = [
    "Adam",
    "Checkpoint",
    "ClipSampler",
    "HrTargets",
    "LossBreakdown",
    "LossWeights",
    "OptimState",
    "StepSchedule",
    "TrainHyper",
    "TrainResult",
    "Trainer",
    "adam_step",
    "charbonnier",
    "hr_targets",
    "load_checkpoint",
    "lr_schedule",
    "save_checkpoint",
    "tape_loss",
    "total_loss",
    "train",
]
