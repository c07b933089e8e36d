# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

from dataclasses import dataclass, field
from typing import List

import numpy as np

from topocell.core.generator import EDGE
from topocell.core.struct.layoutobject import CellLayout
from topocell.core.struct.processobject import OptimizerConfig
from topocell.core.topoloss import TargetDiagrams, evaluate
from topocell.utils.logger import get_logger

log = get_logger(__name__)

TRACE_HEADER = ["step", "count", "intra", "inter", "total"]


@dataclass
class OptimizationResult:
    layout: CellLayout
    trace: List[List[float]] = field(default_factory=list)
    diverged: bool = False
    steps_run: int = 0

    @property
    def initial(self) -> float:
        return self.trace[0][2] + self.trace[0][3]

    @property
    def final(self) -> float:
        return self.trace[-1][2] + self.trace[-1][3]


def _step(layout: CellLayout, gradient, lr: float) -> CellLayout:
    moved = []
    for points, partial in zip(layout.points, gradient.per_class):
        points = points - lr * partial
        points[:, 0] = np.clip(points[:, 0], 0.0, layout.width - EDGE)
        points[:, 1] = np.clip(points[:, 1], 0.0, layout.height - EDGE)
        moved.append(points)
    return layout.with_points(moved)


def optimize_layout(
    init: CellLayout, target: CellLayout, cfg: OptimizerConfig = None
) -> OptimizationResult:
    """
    Move the cells of ``init`` by gradient descent on
    ``lambda_intra L_intra + lambda_inter L_inter`` towards ``target``.

    Counts never change; points are clipped to the canvas after every step.
    The trace holds ``step, count, intra, inter, total`` rows, the first one
    for the starting layout. The run stops early, flagged as diverged, when
    ``lambda_intra L_intra + lambda_inter L_inter`` stays above
    ``divergence_factor`` times its initial value for ``patience``
    consecutive steps. The count term plays no part in this check.

    :return: OptimizationResult
    """
    cfg = cfg or OptimizerConfig()
    init.require_same_frame(target)
    targets = TargetDiagrams(target, cfg.weights)

    layout = init
    breakdown, gradient = evaluate(layout, targets, cfg.weights)
    initial = breakdown.spatial
    trace = [[0, breakdown.count, breakdown.intra, breakdown.inter,
              breakdown.total]]
    above = 0
    diverged = False
    step = 0

    for step in range(1, cfg.steps + 1):
        if not gradient.is_zero():
            layout = _step(layout, gradient, cfg.lr)
            breakdown, gradient = evaluate(layout, targets, cfg.weights)
        if step % cfg.trace_every == 0 or step == cfg.steps:
            trace.append([step, breakdown.count, breakdown.intra,
                          breakdown.inter, breakdown.total])

        above = above + 1 if breakdown.spatial > cfg.divergence_factor * initial else 0
        if initial > 0 and above >= cfg.patience:
            diverged = True
            log.debug(f"Optimizer diverged at step {step}")
            break

    log.debug(
        f"Optimizer ran {step} steps: {trace[0][4]} -> {trace[-1][4]}"
    )
    return OptimizationResult(layout, trace, diverged, step)
