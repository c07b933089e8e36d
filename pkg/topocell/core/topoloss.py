# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

"""
Count, intra-class and inter-class topological losses between a candidate
layout and a target layout, with gradients with respect to the candidate
cell centres.

Each class is stamped, turned into a distance field and summarised by the
persistence diagram of its sublevel filtration. The spatial term of a class
sums, over the candidate diagram points, the squared distance to their
optimal partner in the target diagram (or to the diagonal).
"""

from dataclasses import dataclass
from typing import Dict, Optional, Union

import numpy as np

from topocell import config
from topocell.core.distancetransform import (
    edt_point_gradient,
    exact_edt,
    footprint_owners,
    subpixel_field,
)
from topocell.core.diagrammetrics import wasserstein
from topocell.core.layout import rasterize, stamp
from topocell.core.persistence import cubical_sublevel_diagram
from topocell.core.struct.diagramobject import PersistenceDiagram
from topocell.core.struct.fieldobject import NearestSiteMap, ScalarField
from topocell.core.struct.layoutobject import CellLayout, RasterLayout
from topocell.core.struct.lossobject import (
    TAU_MEDIAN,
    LossBreakdown,
    LossGradient,
    LossWeights,
)
from topocell.core.struct.matchingobject import DIAGONAL
from topocell.errors import NumericalError, PairingError
from topocell.utils.logger import get_logger

log = get_logger(__name__)

TIE_TOLERANCE = 1e-9


def binarize(
    values: np.ndarray,
    rule: str = TAU_MEDIAN,
    tau: float = None,
    per_channel: bool = False,
) -> np.ndarray:
    """
    Threshold a real grid: 1 where ``value >= tau``.

    With the median rule ``tau`` is the median over every channel, or over
    each channel separately with ``per_channel``.

    :param values: (h, w) or (n, h, w) array
    :return: uint8 array of the same shape
    """
    values = np.asarray(values, dtype=np.float64)
    if rule != TAU_MEDIAN:
        return (values >= tau).astype(np.uint8)
    if per_channel and values.ndim == 3:
        taus = np.median(values.reshape(values.shape[0], -1), axis=1)
        return (values >= taus[:, None, None]).astype(np.uint8)
    return (values >= np.median(values)).astype(np.uint8)


def _as_raster(layout, weights: LossWeights) -> RasterLayout:
    if isinstance(layout, CellLayout):
        return rasterize(layout, weights.footprint)
    if isinstance(layout, RasterLayout):
        return layout
    values = np.asarray(layout)
    channels = binarize(
        values, weights.tau_rule, weights.tau, weights.per_channel
    )
    return RasterLayout(channels, [str(i) for i in range(channels.shape[0])])


def count_loss(
    candidate: Union[CellLayout, RasterLayout, np.ndarray],
    target: Union[CellLayout, RasterLayout, np.ndarray],
    weights: LossWeights = None,
) -> float:
    """
    Mean over classes of ``|fg_i(candidate) / delta - fg_i(target) / delta|``.

    Real-valued (n, h, w) grids are binarised first with the weights' tau
    rule; point layouts are stamped with the weights' footprint.

    :raises PairingError: the channel counts differ
    """
    weights = weights or LossWeights()
    candidate = _as_raster(candidate, weights)
    target = _as_raster(target, weights)
    if candidate.n_classes != target.n_classes:
        raise PairingError(
            f"Candidate has {candidate.n_classes} channels, "
            f"target {target.n_classes}."
        )
    difference = (
        candidate.foreground_counts() / weights.delta
        - target.foreground_counts() / weights.delta
    )
    return float(np.mean(np.abs(difference)))


@dataclass
class ClassState:
    """
    Distance field and diagram of one stamped point set.
    """

    points: np.ndarray
    field: ScalarField
    sites: NearestSiteMap
    diagram: PersistenceDiagram


def class_state(points, shape, weights: LossWeights) -> Optional[ClassState]:
    """
    Stamp points, take their distance field and its sublevel diagram in the
    loss dimensions. Diagrams whose every bar is shorter than the degenerate
    threshold count as empty.

    :return: ClassState, or None without any point
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(points) == 0:
        return None
    grid = stamp(shape, points, weights.footprint)
    owners = footprint_owners(points, shape, weights.footprint)
    field, sites = exact_edt(grid, owners)
    if weights.subpixel:
        field = subpixel_field(field, sites, points)

    diagram = cubical_sublevel_diagram(field).in_dimensions(weights.dims)
    if len(diagram) == 0 or (
        diagram.persistence.max() < config.DEGENERATE_PERSISTENCE
    ):
        diagram = PersistenceDiagram()
    return ClassState(points, field, sites, diagram)


def _diagram_of(state: Optional[ClassState]) -> PersistenceDiagram:
    return PersistenceDiagram() if state is None else state.diagram


@dataclass
class SpcResult:
    value: float
    goals: np.ndarray
    matchings: Dict[int, object]
    ties: int


def spc_loss(
    candidate: PersistenceDiagram,
    target: PersistenceDiagram,
    p: float = 2.0,
    symmetric: bool = False,
) -> SpcResult:
    """
    Spatial consistency between two diagrams.

    Each dimension is matched separately under the p-Wasserstein plan; the
    value sums the squared L2 distance of every candidate point to its
    partner, a diagonal partner being its own projection. ``symmetric``
    also adds the squared diagonal distance of unmatched target points.

    :return: SpcResult whose ``goals`` give the partner of each candidate
        point in diagram order
    """
    goals = np.zeros((len(candidate), 2))
    matchings = {}
    value = 0.0
    ties = 0
    offset = 0
    dims = sorted(set(candidate.dims.tolist()) | set(target.dims.tolist()))
    for dim in dims:
        source = candidate.in_dimension(dim)
        other = target.in_dimension(dim)
        _, matching = wasserstein(source, other, p)
        matchings[dim] = matching

        points = source.finite_array()
        partner = matching.targets(source, other)
        squared = np.sum((points - partner) ** 2, axis=1)
        value += float(np.sum(squared))

        diagonal = (points[:, 1] - points[:, 0]) ** 2 / 2.0
        for index_a, index_b in matching.pairs:
            if index_a == DIAGONAL:
                if symmetric:
                    unmatched = other.finite_array()[index_b]
                    value += float((unmatched[1] - unmatched[0]) ** 2 / 2.0)
            elif index_b != DIAGONAL and abs(
                squared[index_a] - diagonal[index_a]
            ) < TIE_TOLERANCE:
                ties += 1

        goals[offset:offset + len(source)] = partner
        offset += len(source)
    return SpcResult(value, goals, matchings, ties)


def _route(state: ClassState, goals: np.ndarray):
    """
    Push ``2 (q - goal)`` of every diagram point back onto the cell centres
    through its birth and death pixels.
    """
    gradient = np.zeros_like(state.points)
    nondifferentiable = 0
    points = state.diagram.finite_array()
    for index, (point, goal) in enumerate(zip(points, goals)):
        coefficients = 2.0 * (point - goal)
        cells = (state.diagram.birth_cells[index],
                 state.diagram.death_cells[index])
        for coefficient, (row, col) in zip(coefficients, cells):
            if coefficient == 0.0:
                continue
            partial, differentiable = edt_point_gradient(
                state.field, state.sites, state.points, (col, row)
            )
            if differentiable:
                gradient += coefficient * partial
            else:
                nondifferentiable += 1
    return gradient, nondifferentiable


class TargetDiagrams:
    """
    Per-class and aggregated diagrams of a target layout, computed once.
    """

    def __init__(self, target: CellLayout, weights: LossWeights) -> None:
        self.layout = target
        self.per_class = [
            _diagram_of(class_state(points, target.shape, weights))
            for points in target.points
        ]
        self.aggregated = _diagram_of(
            class_state(target.stacked()[0], target.shape, weights)
        )


def _targets(target, weights):
    if isinstance(target, TargetDiagrams):
        return target
    return TargetDiagrams(target, weights)


def intra_loss(candidate: CellLayout, target, weights: LossWeights = None):
    """
    Mean over classes of the per-class spatial consistency term.

    :return: (value, per-class values)
    """
    weights = weights or LossWeights()
    breakdown, _ = evaluate(
        candidate, target, weights, terms=("intra",), gradient=False
    )
    return breakdown.intra, breakdown.intra_per_class


def inter_loss(candidate: CellLayout, target, weights: LossWeights = None):
    """
    Spatial consistency term of the aggregated (all-class) layouts.
    """
    weights = weights or LossWeights()
    breakdown, _ = evaluate(
        candidate, target, weights, terms=("inter",), gradient=False
    )
    return breakdown.inter


def total_loss(candidate: CellLayout, target, weights: LossWeights = None):
    """
    ``lambda_count L_count + lambda_intra L_intra + lambda_inter L_inter``.

    :return: LossBreakdown
    """
    return evaluate(candidate, target, weights, gradient=False)[0]


def loss_gradient(candidate: CellLayout, target, weights: LossWeights = None):
    """
    Gradient of ``lambda_intra L_intra + lambda_inter L_inter`` with respect
    to the candidate centres. The count term is piecewise constant in the
    positions and contributes nothing.

    :return: LossGradient
    """
    return evaluate(candidate, target, weights)[1]


def evaluate(
    candidate: CellLayout,
    target: Union[CellLayout, TargetDiagrams],
    weights: LossWeights = None,
    terms=("count", "intra", "inter"),
    gradient: bool = True,
):
    """
    Loss breakdown and, optionally, gradient in a single pass.

    :param candidate: the layout being scored
    :param target: target layout, or its precomputed TargetDiagrams
    :param terms: which terms to evaluate, the others stay 0
    :raises PairingError: canvas or classes differ
    :raises NumericalError: a non-finite value
    :return: (LossBreakdown, LossGradient or None)
    """
    weights = weights or LossWeights()
    targets = _targets(target, weights)
    candidate.require_same_frame(targets.layout)
    n_classes = candidate.n_classes
    per_class_gradient = [np.zeros_like(p) for p in candidate.points]
    flags = []
    nondifferentiable = ties = 0

    count = 0.0
    if "count" in terms:
        count = count_loss(candidate, targets.layout, weights)

    intra_values = [0.0] * n_classes
    intra_matchings = []
    if "intra" in terms:
        for class_id, points in enumerate(candidate.points):
            state = class_state(points, candidate.shape, weights)
            target_diagram = targets.per_class[class_id]
            result = spc_loss(
                _diagram_of(state), target_diagram, weights.p, weights.symmetric
            )
            intra_values[class_id] = result.value
            intra_matchings.append(result.matchings)
            ties += result.ties
            if gradient and state is not None and len(state.diagram):
                partial, skipped = _route(state, result.goals)
                per_class_gradient[class_id] += (
                    weights.lambda_intra / n_classes * partial
                )
                nondifferentiable += skipped
    intra = float(np.mean(intra_values)) if "intra" in terms else 0.0

    inter = 0.0
    inter_matchings = {}
    if "inter" in terms:
        coordinates, labels = candidate.stacked()
        state = class_state(coordinates, candidate.shape, weights)
        result = spc_loss(
            _diagram_of(state), targets.aggregated, weights.p, weights.symmetric
        )
        inter = result.value
        inter_matchings = result.matchings
        ties += result.ties
        if gradient and state is not None and len(state.diagram):
            partial, skipped = _route(state, result.goals)
            nondifferentiable += skipped
            for class_id in range(n_classes):
                per_class_gradient[class_id] += (
                    weights.lambda_inter * partial[labels == class_id]
                )

    if ties:
        flags.append(f"{ties} matching ties resolved deterministically")
    if nondifferentiable:
        flags.append(f"{nondifferentiable} critical pixels not differentiable")

    breakdown = LossBreakdown(
        count,
        intra,
        intra_values,
        inter,
        weights,
        {"intra": intra_matchings, "inter": inter_matchings},
        flags,
    )
    if not np.isfinite(breakdown.total):
        raise NumericalError("The loss evaluated to a non-finite value.")

    if not gradient:
        return breakdown, None
    if not all(np.all(np.isfinite(g)) for g in per_class_gradient):
        raise NumericalError("The loss gradient is not finite.")
    log.debug(
        f"Loss count={count} intra={intra} inter={inter} "
        f"total={breakdown.total}"
    )
    return breakdown, LossGradient(per_class_gradient, nondifferentiable, ties)
