"""Ablation grids over architecture variants and loss weights."""
from __future__ import annotations

import csv
import io
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np
from rich.table import Table

from sdvsr.autograd.tape import Tape
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
from sdvsr.data.sequence import SequenceSample
from sdvsr.errors import ArgumentError, UsageError
from sdvsr.metrics.evaluate import evaluate
from sdvsr.model.complexity import param_count
from sdvsr.model.config import ModelConfig, architecture_grid
from sdvsr.model.rsdn import RSDN
from sdvsr.training.losses import LossWeights, hr_targets, tape_loss
from sdvsr.training.trainer import Trainer, TrainHyper

logger = logging.getLogger(__name__)

ABLATION_CSV = "ablation.csv"
CSV_COLUMNS = (
    "grid",
    "model",
    "label",
    "alpha",
    "beta",
    "gamma",
    "params",
    "seeds",
    "loss",
    "structure",
    "detail",
    "image",
    "psnr_y",
    "ssim_y",
    "rank",
)
LOSS_WEIGHT_GRID = ((1.0, 0.5, 1.0), (0.5, 1.0, 1.0), (1.0, 1.0, 0.0), (1.0, 1.0, 1.0))
# (better, worse) model numbers of the architecture grid
ARCHITECTURE_ORDERING = ((7, 1), (7, 4), (8, 2), (8, 5))
# losses are averaged over this many trailing iterations
LOSS_WINDOW = 10

RunCallback = Callable[[int, int, str], None]


class Grid(str, Enum):
    ARCHITECTURES = "table1"
    LOSS_WEIGHTS = "table2"


@dataclass(frozen=True)
class AblationCase:
    number: int
    model: ModelConfig
    weights: LossWeights

    @property
    def label(self) -> str:
        return self.model.label


@dataclass(frozen=True)
class AblationRow:
    grid: str
    model: int
    label: str
    alpha: float
    beta: float
    gamma: float
    params: int
    seeds: int
    loss: float
    structure: float
    detail: float
    image: float
    psnr_y: float
    ssim_y: float
    active: tuple[str, ...]
    # largest |dL/dI_hr| over a short clip; nan until measured
    image_grad: float = math.nan
    rank: int = 0


@dataclass(frozen=True)
class OrderingCheck:
    description: str
    holds: bool


@dataclass(frozen=True)
class AblationResult:
    """Result of an ablation grid."""

    grid: Grid
    rows: list[AblationRow]
    checks: list[OrderingCheck]
    csv_path: Path
    snapshot: Path

    @property
    def ordering_ok(self) -> bool:
        return all(check.holds for check in self.checks)


def parse_grid(value: object) -> Grid:
    try:
        return Grid(str(value))
    except ValueError as exc:
        choices = ", ".join(g.value for g in Grid)
        raise UsageError(f"unknown grid {value!r}; expected one of {choices}") from exc


def grid_cases(grid: Grid | str, base: ModelConfig, weights: LossWeights) -> list[AblationCase]:
    """Architecture grid (eight models) or loss-weight grid (four settings on ``base``)."""
    grid = Grid(grid)
    if grid is Grid.ARCHITECTURES:
        configs = architecture_grid(base.channels, base.blocks, base.scale)
        return [AblationCase(number, config, weights) for number, config in configs]
    return [
        AblationCase(number, base, replace(weights, alpha=a, beta=b, gamma=g))
        for number, (a, b, g) in enumerate(LOSS_WEIGHT_GRID, start=1)
    ]


def budget_hyper(hyper: TrainHyper, budget: int, seed: int) -> TrainHyper:
    """Same schedule shape for every case, truncated to ``budget`` iterations."""
    if budget < 1:
        raise ArgumentError(f"iteration budget must be positive, got {budget}")
    return replace(
        hyper,
        iterations_per_epoch=math.ceil(budget / hyper.epochs),
        max_iterations=budget,
        seed=seed,
        val_every=budget,
        checkpoint_every=budget,
    )


def image_term_gradient(case: AblationCase, sample: SequenceSample, seed: int = 0, frames: int = 2) -> float:
    """Largest |dL/dI_hr| over the first ``frames`` steps of ``sample``.

    ``I_hr`` only feeds the image term, so the value is exactly zero when that
    term is kept off the tape.
    """
    config = case.model
    model = RSDN.from_seed(config, seed, dtype=np.float64)
    tape = Tape()
    steps = model.unroll(tape, sample.lr_frames[:frames])
    targets = [
        hr_targets(frame, config.scale, method=config.decomposition, sigma=config.lowpass_sigma)
        for frame in sample.hr_frames[:frames]
    ]
    loss, _ = tape_loss(tape, steps, targets, case.weights)
    grads = tape.backward(loss)
    return max(float(np.abs(grads[step.i_hr]).max()) for step in steps)


def rank_rows(rows: Sequence[AblationRow]) -> list[AblationRow]:
    """Rank 1 is the highest Y-PSNR; ties keep grid order."""
    order = sorted(range(len(rows)), key=lambda i: (-rows[i].psnr_y, i))
    ranks = {index: position for position, index in enumerate(order, start=1)}
    return [replace(row, rank=ranks[i]) for i, row in enumerate(rows)]


def ordering_checks(grid: Grid, rows: Sequence[AblationRow]) -> list[OrderingCheck]:
    by_model = {row.model: row for row in rows}
    if grid is Grid.ARCHITECTURES:
        return [
            OrderingCheck(
                f"model {better} ({by_model[better].label}) >= model {worse} ({by_model[worse].label})",
                by_model[better].psnr_y >= by_model[worse].psnr_y,
            )
            for better, worse in ARCHITECTURE_ORDERING
            if better in by_model and worse in by_model
        ]
    checks: list[OrderingCheck] = []
    for row in rows:
        if row.gamma == 0:
            checks.append(OrderingCheck(f"no image-term gradient for setting {row.model}", row.image_grad == 0.0))
    decompositions = {(row.structure, row.detail, row.image) for row in rows}
    checks.append(OrderingCheck("loss decompositions are distinct", len(decompositions) == len(rows)))
    return checks


def ablation_csv(rows: Sequence[AblationRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.grid,
                row.model,
                row.label,
                f"{row.alpha:g}",
                f"{row.beta:g}",
                f"{row.gamma:g}",
                row.params,
                row.seeds,
                f"{row.loss:.8f}",
                f"{row.structure:.8f}",
                f"{row.detail:.8f}",
                f"{row.image:.8f}",
                f"{row.psnr_y:.6f}",
                f"{row.ssim_y:.6f}",
                row.rank,
            ]
        )
    return buffer.getvalue()


def render_ablation(result: AblationResult) -> Table:
    table = Table(title=f"Ablation {result.grid.value}")
    for column in ("Rank", "Model", "Label", "α/β/γ", "Params", "Loss", "PSNR-Y", "SSIM-Y"):
        table.add_column(column, justify="left" if column == "Label" else "right")
    for row in sorted(result.rows, key=lambda r: r.rank):
        table.add_row(
            str(row.rank),
            str(row.model),
            row.label,
            f"{row.alpha:g}/{row.beta:g}/{row.gamma:g}",
            f"{row.params:,}",
            f"{row.loss:.5f}",
            f"{row.psnr_y:.2f}",
            f"{row.ssim_y:.4f}",
        )
    return table


class AblationService:
    """Service for training every case of a grid under one budget and seed set."""

    def __init__(self, debug: bool = False, progress_callback: RunCallback | None = None) -> None:
        self._debug = debug
        self._progress_callback = progress_callback

    def _run_case(
        self,
        grid: Grid,
        case: AblationCase,
        hyper: TrainHyper,
        budget: int,
        seeds: Sequence[int],
        train_set: SequenceDataset,
        score_set: SequenceDataset,
    ) -> AblationRow:
        losses: list[np.ndarray] = []
        scores: list[tuple[float, float]] = []
        for seed in seeds:
            model = RSDN.from_seed(case.model, seed)
            result = Trainer(model, case.weights, budget_hyper(hyper, budget, seed)).run(train_set)
            tail = result.breakdowns[-LOSS_WINDOW:]
            losses.append(np.mean([[b.total, b.structure, b.detail, b.image] for b in tail], axis=0))
            mean = evaluate(result.model, score_set, hyper.border_crop).mean()
            scores.append((mean.psnr_y, mean.ssim_y))
        loss, structure, detail, image = np.mean(losses, axis=0)
        psnr_y, ssim_y = np.mean(scores, axis=0)
        alpha, beta, gamma = case.weights.as_tuple()
        return AblationRow(
            grid=grid.value,
            model=case.number,
            label=case.label,
            alpha=alpha,
            beta=beta,
            gamma=gamma,
            params=param_count(case.model),
            seeds=len(seeds),
            loss=float(loss),
            structure=float(structure),
            detail=float(detail),
            image=float(image),
            psnr_y=float(psnr_y),
            ssim_y=float(ssim_y),
            active=case.weights.active_terms,
            image_grad=image_term_gradient(case, train_set[0]),
        )

    def run(self, config: RunConfig) -> AblationResult:
        """
        Run the grid named by ``config['grid']`` and write ``ablation.csv``.

        Ordering checks are reported, never raised.
        """
        values = config.values
        require(values, "data", "out")
        grid = parse_grid(values["grid"])
        base = model_config_from(values)
        hyper = train_hyper_from(values)
        budget = int(values["budget_iters"])
        seed_count = int(values["seeds"])
        if seed_count < 1:
            raise ArgumentError(f"seeds must be positive, got {seed_count}")
        seeds = [hyper.seed + i for i in range(seed_count)]
        out_dir = Path(values["out"])
        snapshot = ConfigManager.write_snapshot(values, out_dir)

        dataset = SequenceDataset.from_path(
            values["data"], base.scale, float(values["sigma"]), degrade_mode_from(values)
        )
        train_set, val_set = dataset.split(float(values["val_fraction"]), hyper.seed)
        score_set = val_set if len(val_set) else train_set
        if not len(val_set):
            logger.warning("no validation sequences; scoring on the training set")

        cases = grid_cases(grid, base, loss_weights_from(values))
        if self._debug:
            print_debug(
                "Ablation plan",
                {"grid": grid.value, "cases": [c.label for c in cases], "seeds": seeds, "budget": budget},
                is_yaml=True,
            )
        rows: list[AblationRow] = []
        for index, case in enumerate(cases):
            if self._progress_callback:
                self._progress_callback(index, len(cases), case.label)
            rows.append(self._run_case(grid, case, hyper, budget, seeds, train_set, score_set))
            logger.info("case %d (%s): psnr_y %.3f", case.number, case.label, rows[-1].psnr_y)
        if self._progress_callback:
            self._progress_callback(len(cases), len(cases), "done")

        rows = rank_rows(rows)
        checks = ordering_checks(grid, rows)
        for check in checks:
            if not check.holds:
                logger.warning("ordering not met: %s", check.description)
        csv_path = out_dir / ABLATION_CSV
        csv_path.write_text(ablation_csv(rows), encoding="utf-8")
        return AblationResult(grid=grid, rows=rows, checks=checks, csv_path=csv_path, snapshot=snapshot)
