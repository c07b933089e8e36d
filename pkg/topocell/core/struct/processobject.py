# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

from dataclasses import dataclass, field
from typing import Optional, Tuple

from topocell import config
from topocell.core.struct.lossobject import LossWeights
from topocell.errors import ParameterError

POISSON = "poisson"
MATERN = "matern_cluster"
RING_SCENE = "ring_scene"
PROCESS_KINDS = (POISSON, MATERN, RING_SCENE)


@dataclass(frozen=True)
class RingSpec:
    """
    ``m`` cells of one class evenly spread on a circle.
    """

    class_id: int
    cx: float
    cy: float
    radius: float
    m: int

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError(f"Ring radius must be > 0, got {self.radius}.")
        if self.m < 3:
            raise ParameterError(f"A ring needs >= 3 cells, got {self.m}.")


@dataclass(frozen=True)
class PointProcessSpec:
    """
    Recipe of a synthetic layout.

    ``counts`` fixes the number of cells per class; without it ``poisson``
    draws the counts from ``intensity`` (cells per pixel) and
    ``matern_cluster`` from its parent and offspring rates.
    """

    kind: str = POISSON
    width: int = 256
    height: int = 256
    class_names: Tuple[str, ...] = ("0",)
    counts: Optional[Tuple[int, ...]] = None
    intensity: Optional[Tuple[float, ...]] = None
    min_separation: float = 0.0
    parent_intensity: float = 1e-4
    cluster_radius: float = 20.0
    mean_offspring: float = 10.0
    rings: Tuple[RingSpec, ...] = ()
    jitter: float = 0.0
    phase: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in PROCESS_KINDS:
            raise ParameterError(
                f"Unknown process {self.kind!r}; choose from "
                f"{', '.join(PROCESS_KINDS)}."
            )
        if self.width < 1 or self.height < 1:
            raise ParameterError("The canvas must be at least 1x1.")
        n = len(self.class_names)
        for name in ("counts", "intensity"):
            values = getattr(self, name)
            if values is None:
                continue
            if len(values) != n:
                raise ParameterError(
                    f"{name} needs one value per class ({n}), got {len(values)}."
                )
            if any(v < 0 for v in values):
                raise ParameterError(f"{name} must be >= 0, got {values}.")
        if self.kind == POISSON and self.counts is None and self.intensity is None:
            raise ParameterError("A Poisson process needs counts or intensity.")
        if self.min_separation < 0 or self.jitter < 0:
            raise ParameterError("min_separation and jitter must be >= 0.")
        if self.kind == MATERN and not (
            self.cluster_radius > 0 and self.parent_intensity > 0
            and self.mean_offspring >= 0
        ):
            raise ParameterError(
                "Matern clusters need a positive radius and parent intensity."
            )
        for ring in self.rings:
            if not 0 <= ring.class_id < n:
                raise ParameterError(
                    f"Ring class {ring.class_id} is not one of {n} classes."
                )
        if not 0 <= self.seed < 2 ** 64:
            raise ParameterError("The seed must be a 64-bit unsigned integer.")


@dataclass(frozen=True)
class OptimizerConfig:
    """
    Plain gradient descent on the cell centres.
    """

    steps: int = config.OPTIMIZER_STEPS
    lr: float = config.OPTIMIZER_LR
    weights: LossWeights = field(default_factory=LossWeights)
    trace_every: int = 1
    divergence_factor: float = config.DIVERGENCE_FACTOR
    patience: int = config.DIVERGENCE_PATIENCE

    def __post_init__(self):
        if self.steps < 1:
            raise ParameterError(f"steps must be >= 1, got {self.steps}.")
        if not self.lr > 0:
            raise ParameterError(f"The step size must be > 0, got {self.lr}.")
        if self.trace_every < 1:
            raise ParameterError("trace_every must be >= 1.")
