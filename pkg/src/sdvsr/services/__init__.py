"""Service layer for sdvsr."""
from sdvsr.services.ablation import AblationResult, AblationRow, AblationService, Grid, OrderingCheck
from sdvsr.services.datasets import DatasetService, DegradeResult, SynthResult
from sdvsr.services.inference import (
    EvaluationResult,
    InferenceResult,
    InferenceService,
    evaluate_checkpoint,
)
from sdvsr.services.training import TrainingResult, TrainingService

__all__ = [
    "AblationResult",
    "AblationRow",
    "AblationService",
    "DatasetService",
    "DegradeResult",
    "EvaluationResult",
    "Grid",
    "InferenceResult",
    "InferenceService",
    "OrderingCheck",
    "SynthResult",
    "TrainingResult",
    "TrainingService",
    "evaluate_checkpoint",
]
