"""Quality metrics, evaluation reports and visualizations."""
from sdvsr.metrics.evaluate import (
    EvalReport,
    FrameMetrics,
    SequenceMetrics,
    bicubic_baseline,
    evaluate,
    render_table,
)
from sdvsr.metrics.quality import psnr, rgb_to_y, ssim
from sdvsr.metrics.visualize import dump_hidden_channels, temporal_profile

__all__ = [
    "EvalReport",
    "FrameMetrics",
    "SequenceMetrics",
    "bicubic_baseline",
    "dump_hidden_channels",
    "evaluate",
    "psnr",
    "render_table",
    "rgb_to_y",
    "ssim",
    "temporal_profile",
]
