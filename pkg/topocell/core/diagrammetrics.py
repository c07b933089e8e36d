# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

"""
Distances, matchings, landscapes and barycenters of persistence diagrams.
"""

from typing import List, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial.distance import cdist

from topocell import config
from topocell.core.struct.diagramobject import PersistenceDiagram
from topocell.core.struct.matchingobject import (
    DIAGONAL,
    BarycenterResult,
    LandscapeVector,
    Matching,
)
from topocell.errors import DiagramError, ParameterError
from topocell.utils.logger import get_logger

log = get_logger(__name__)

SQRT2 = np.sqrt(2.0)


def _check_same_dimension(a: PersistenceDiagram, b: PersistenceDiagram):
    dims = set(np.unique(a.dims).tolist()) | set(np.unique(b.dims).tolist())
    if len(dims) > 1:
        raise DiagramError(
            f"Diagrams mix dimensions {sorted(dims)}; "
            "restrict them to one dimension first."
        )


def _augmented_cost(source, target, ground_distance, diagonal_distance):
    m, n = len(source), len(target)
    cost = np.zeros((m + n, m + n))
    cost[:m, n:] = np.inf
    cost[m:, :n] = np.inf
    if m and n:
        cost[:m, :n] = ground_distance(source, target)
    if m:
        cost[np.arange(m), n + np.arange(m)] = diagonal_distance(source)
    if n:
        cost[m + np.arange(n), np.arange(n)] = diagonal_distance(target)
    return cost


def _pairs_from_assignment(rows, cols, m, n):
    pairs = []
    for row, col in zip(rows, cols):
        if row < m and col < n:
            pairs.append((int(row), int(col)))
        elif row < m:
            pairs.append((int(row), DIAGONAL))
        elif col < n:
            pairs.append((DIAGONAL, int(col)))
    return pairs


def _l2(source, target):
    return cdist(source, target)


def _l2_to_diagonal(points):
    return (points[:, 1] - points[:, 0]) / SQRT2


def wasserstein(a: PersistenceDiagram, b: PersistenceDiagram, p: float = 2.0):
    """
    p-Wasserstein distance between two diagrams of one dimension, with the
    L2 ground metric. Any point may be matched to its orthogonal projection
    on the diagonal.

    The assignment is solved exactly with the Hungarian algorithm on the
    square matrix of (points + diagonal slots), the costs being p-th powers
    of the ground distances.

    :param a: first diagram
    :param b: second diagram
    :param p: order, ``p >= 1``
    :raises DiagramError: the diagrams mix dimensions
    :raises ParameterError: ``p < 1``
    :return: (distance, Matching)
    """
    if not p >= 1:
        raise ParameterError(f"Wasserstein order must be >= 1, got {p}.")
    _check_same_dimension(a, b)

    source, target = a.finite_array(), b.finite_array()
    m, n = len(source), len(target)
    if m + n == 0:
        return 0.0, Matching([], 0.0, p)

    lengths = _augmented_cost(source, target, _l2, _l2_to_diagonal)
    rows, cols = linear_sum_assignment(lengths ** p)

    matching = Matching(_pairs_from_assignment(rows, cols, m, n), 0.0, p)
    matching.cost = matching.recompute(a, b)
    return matching.distance, matching


def bottleneck(a: PersistenceDiagram, b: PersistenceDiagram) -> float:
    """
    Bottleneck distance with the L-infinity ground metric.

    The answer is one of the finite entries of the augmented cost matrix; the
    smallest entry admitting a perfect matching among cheaper-or-equal edges
    is found by bisection.
    """
    _check_same_dimension(a, b)
    source, target = a.finite_array(), b.finite_array()
    m, n = len(source), len(target)
    if m + n == 0:
        return 0.0

    cost = _augmented_cost(
        source,
        target,
        lambda s, t: cdist(s, t, metric="chebyshev"),
        lambda points: (points[:, 1] - points[:, 0]) / 2.0,
    )
    candidates = np.unique(cost[np.isfinite(cost)])

    low, high = 0, len(candidates) - 1
    while low < high:
        middle = (low + high) // 2
        graph = csr_matrix((cost <= candidates[middle]).astype(np.int8))
        matched = maximum_bipartite_matching(graph, perm_type="column")
        if np.all(matched >= 0):
            high = middle
        else:
            low = middle + 1
    return float(candidates[low])


def pairwise_wasserstein(
    diagrams: Sequence[PersistenceDiagram],
    others: Sequence[PersistenceDiagram] = None,
    p: float = 1.0,
) -> np.ndarray:
    """
    Matrix of Wasserstein distances, symmetric when ``others`` is omitted.
    """
    if others is None:
        size = len(diagrams)
        matrix = np.zeros((size, size))
        for i in range(size):
            for j in range(i + 1, size):
                matrix[i, j] = matrix[j, i] = wasserstein(
                    diagrams[i], diagrams[j], p
                )[0]
        return matrix

    matrix = np.zeros((len(diagrams), len(others)))
    for i, first in enumerate(diagrams):
        for j, second in enumerate(others):
            matrix[i, j] = wasserstein(first, second, p)[0]
    return matrix


def landscape_grid(
    diagrams: Sequence[PersistenceDiagram],
    samples: int = config.LANDSCAPE_SAMPLES,
) -> np.ndarray:
    """
    Uniform grid from the smallest birth to the largest death over all the
    given diagrams.

    Without any point the grid spans [0, 1]; a zero-width span is widened by
    one on each side.
    """
    if samples < 2:
        raise ParameterError(f"A landscape grid needs >= 2 samples, got {samples}.")
    births = [d.births for d in diagrams if len(d)]
    deaths = [d.deaths for d in diagrams if len(d)]
    if not births:
        return np.linspace(0.0, 1.0, samples)

    low = float(np.min(np.concatenate(births)))
    high = float(np.max(np.concatenate(deaths)))
    if high <= low:
        low, high = low - 1.0, high + 1.0
    return np.linspace(low, high, samples)


def landscape(
    diagram: PersistenceDiagram,
    levels: int = config.LANDSCAPE_LEVELS,
    grid: np.ndarray = None,
) -> LandscapeVector:
    """
    Sample the first ``levels`` landscape functions of a diagram.

    ``lambda_k(t)`` is the k-th largest value of ``max(0, min(t - b, d - t))``
    over the diagram points.

    :param diagram: a diagram of one dimension
    :param levels: number of landscape functions, ``>= 1``
    :param grid: strictly increasing sample abscissas, defaults to the grid
        spanned by this diagram alone
    :return: LandscapeVector with a (levels, len(grid)) value array
    """
    if levels < 1:
        raise ParameterError(f"Landscape levels must be >= 1, got {levels}.")
    grid = landscape_grid([diagram]) if grid is None else np.asarray(
        grid, dtype=np.float64
    )
    if grid.ndim != 1 or len(grid) < 1 or np.any(np.diff(grid) <= 0):
        raise ParameterError("The landscape grid must be strictly increasing.")

    values = np.zeros((levels, len(grid)))
    if len(diagram):
        births = diagram.births[:, None]
        deaths = diagram.deaths[:, None]
        tents = np.maximum(
            0.0, np.minimum(grid[None, :] - births, deaths - grid[None, :])
        )
        tents = -np.sort(-tents, axis=0)
        depth = min(levels, len(tents))
        values[:depth] = tents[:depth]
    return LandscapeVector(levels, grid, values)


def _canonical_key(diagram: PersistenceDiagram):
    return (
        diagram.total_persistence,
        len(diagram),
        tuple(map(tuple, diagram.finite_array().tolist())),
    )


def _objective_and_targets(current, diagrams):
    """
    Match the current barycenter against every diagram.

    :return: (summed squared W2, list of (len(current), 2) target arrays)
    """
    total = 0.0
    targets = []
    for diagram in diagrams:
        distance, matching = wasserstein(current, diagram, p=2.0)
        total += distance ** 2
        targets.append(matching.targets(current, diagram))
    return total, targets


def barycenter(
    diagrams: Sequence[PersistenceDiagram],
    max_iter: int = config.BARYCENTER_MAX_ITER,
    tol: float = config.BARYCENTER_TOL,
) -> BarycenterResult:
    """
    Frechet mean of diagrams under the 2-Wasserstein distance.

    Starting from the input with the median total persistence, the points
    of the candidate are repeatedly matched against every input and moved
    to the mean of their partners, a diagonal partner being the projection
    of the point itself. The search stops after ``max_iter`` rounds or when
    the objective changes by less than ``tol`` relative to its last value.
    Only local optimality is reached.

    :param diagrams: non-empty collection of one-dimension diagrams
    :raises DiagramError: empty input or mixed dimensions
    :return: BarycenterResult
    """
    if len(diagrams) == 0:
        raise DiagramError("A barycenter needs at least one diagram.")
    dims = set()
    for diagram in diagrams:
        dims |= set(np.unique(diagram.dims).tolist())
    if len(dims) > 1:
        raise DiagramError(f"Barycenter inputs mix dimensions {sorted(dims)}.")
    dim = dims.pop() if dims else 1

    diagrams = sorted(diagrams, key=_canonical_key)
    current = diagrams[(len(diagrams) - 1) // 2]
    objective, targets = _objective_and_targets(current, diagrams)
    trace = [objective]
    converged = objective == 0.0
    iterations = 0

    while not converged and iterations < max_iter:
        iterations += 1
        stacked = np.zeros_like(current.finite_array())
        for target in targets:
            stacked += target
        moved = stacked / len(diagrams)

        keep = moved[:, 1] - moved[:, 0] > 0.0
        candidate = PersistenceDiagram.from_pairs(moved[keep], dim)
        candidate_objective, candidate_targets = _objective_and_targets(
            candidate, diagrams
        )
        if candidate_objective > objective:
            converged = True
            break

        change = objective - candidate_objective
        current, objective, targets = (
            candidate, candidate_objective, candidate_targets
        )
        trace.append(objective)
        if objective == 0.0 or change <= tol * max(trace[-2], 1e-300):
            converged = True

    log.debug(
        f"Barycenter of {len(diagrams)} diagrams: objective {objective} "
        f"after {iterations} iterations, converged={converged}"
    )
    return BarycenterResult(current, objective, iterations, converged, trace)


def w1_gaussian_kernel(
    a: PersistenceDiagram, b: PersistenceDiagram, sigma: float
) -> float:
    """
    ``exp(-W1(a, b) / sigma^2)``, a similarity in (0, 1].
    """
    if not sigma > 0:
        raise ParameterError(f"Kernel sigma must be positive, got {sigma}.")
    return float(np.exp(-wasserstein(a, b, p=1.0)[0] / sigma ** 2))


def kernel_matrix(distances: np.ndarray, sigma: float) -> np.ndarray:
    """
    The W1 Gaussian kernel applied to a precomputed W1 distance matrix.
    """
    if not sigma > 0:
        raise ParameterError(f"Kernel sigma must be positive, got {sigma}.")
    return np.exp(-np.asarray(distances) / sigma ** 2)


def stack_landscapes(vectors: List[LandscapeVector]) -> np.ndarray:
    return np.stack([vector.vector for vector in vectors])
