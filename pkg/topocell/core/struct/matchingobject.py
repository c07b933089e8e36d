# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from topocell.core.struct.diagramobject import PersistenceDiagram

DIAGONAL = -1


def diagonal_projection(points: np.ndarray) -> np.ndarray:
    """
    Orthogonal projection of (birth, death) points onto the diagonal.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    middle = points.mean(axis=1)
    return np.column_stack([middle, middle])


@dataclass
class Matching:
    """
    An augmented bijection between two diagrams.

    Each pair is (index in A, index in B); either side may be ``DIAGONAL``
    for a point sent to its projection on the diagonal.
    """

    pairs: List[Tuple[int, int]]
    cost: float
    p: float = 2.0

    @property
    def distance(self) -> float:
        return float(self.cost ** (1.0 / self.p))

    def partner_of(self, index_a: int) -> int:
        for a, b in self.pairs:
            if a == index_a:
                return b
        raise KeyError(index_a)

    def targets(self, a: PersistenceDiagram, b: PersistenceDiagram):
        """
        Where every point of ``a`` is sent: its partner in ``b`` or its own
        diagonal projection.

        :return: (len(a), 2) array
        """
        source = a.finite_array()
        target = diagonal_projection(source)
        other = b.finite_array()
        for index_a, index_b in self.pairs:
            if index_a != DIAGONAL and index_b != DIAGONAL:
                target[index_a] = other[index_b]
        return target

    def recompute(self, a: PersistenceDiagram, b: PersistenceDiagram) -> float:
        """
        Sum of p-th powers of the L2 lengths of every pair.
        """
        source, other = a.finite_array(), b.finite_array()
        total = 0.0
        for index_a, index_b in self.pairs:
            if index_a == DIAGONAL:
                point = other[index_b]
                length = (point[1] - point[0]) / np.sqrt(2.0)
            elif index_b == DIAGONAL:
                point = source[index_a]
                length = (point[1] - point[0]) / np.sqrt(2.0)
            else:
                length = np.hypot(*(source[index_a] - other[index_b]))
            total += length ** self.p
        return float(total)

    def to_dict(self) -> dict:
        return {
            "pairs": [[int(a), int(b)] for a, b in self.pairs],
            "cost": self.cost,
        }


@dataclass
class LandscapeVector:
    """
    The first ``levels`` landscape functions sampled on ``grid``.
    """

    levels: int
    grid: np.ndarray
    values: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return self.values.reshape(-1)


@dataclass
class BarycenterResult:
    """
    A local minimiser of the summed squared 2-Wasserstein distances.
    """

    diagram: PersistenceDiagram
    objective: float
    iterations: int
    converged: bool
    trace: List[float] = field(default_factory=list)
