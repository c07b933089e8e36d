# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from topocell.errors import DiagramError

RIPS = "rips"
CUBICAL = "cubical"


@dataclass(frozen=True)
class FiltrationSpec:
    """
    How a filtration is built and how far it is followed.

    ``max_scale`` only applies to Rips filtrations; ``None`` means the caller
    picks a default, usually the canvas diagonal.
    """

    mode: str = RIPS
    max_dimension: int = 1
    max_scale: Optional[float] = None

    def __post_init__(self):
        if self.mode not in (RIPS, CUBICAL):
            raise DiagramError(
                f"Filtration mode must be '{RIPS}' or '{CUBICAL}', "
                f"got {self.mode!r}."
            )
        if self.max_dimension not in (0, 1):
            raise DiagramError(
                f"Only dimensions 0 and 1 are supported, "
                f"got {self.max_dimension}."
            )
        if self.mode == RIPS and self.max_scale is not None:
            if not self.max_scale > 0:
                raise DiagramError(
                    f"Rips max_scale must be positive, got {self.max_scale}."
                )


class PersistenceDiagram:
    """
    PersistenceDiagram stores finite (birth, death) pairs of dimensions 0
    and 1, together with the critical cells that created and destroyed them.

    Points are kept in a canonical order: by dimension, birth, death and then
    provenance, so equal inputs always give the same indices.
    """

    __slots__ = ["_dims", "_births", "_deaths", "_birth_cells", "_death_cells"]

    def __init__(
        self,
        dims: Sequence[int] = (),
        births: Sequence[float] = (),
        deaths: Sequence[float] = (),
        birth_cells: Sequence[Tuple[int, ...]] = None,
        death_cells: Sequence[Tuple[int, ...]] = None,
    ) -> None:
        dims = np.asarray(dims, dtype=np.int64).reshape(-1)
        births = np.asarray(births, dtype=np.float64).reshape(-1)
        deaths = np.asarray(deaths, dtype=np.float64).reshape(-1)

        if not len(dims) == len(births) == len(deaths):
            raise DiagramError("dims, births and deaths differ in length.")
        if not np.all(np.isin(dims, (0, 1))):
            raise DiagramError("Diagram dimensions must be 0 or 1.")
        if not (np.all(np.isfinite(births)) and np.all(np.isfinite(deaths))):
            raise DiagramError("Diagram points must be finite.")
        if np.any(deaths < births):
            raise DiagramError("Every diagram point needs death >= birth.")

        if birth_cells is None:
            birth_cells = [()] * len(dims)
        if death_cells is None:
            death_cells = [()] * len(dims)
        birth_cells = [tuple(int(v) for v in c) for c in birth_cells]
        death_cells = [tuple(int(v) for v in c) for c in death_cells]

        order = sorted(
            range(len(dims)),
            key=lambda i: (
                dims[i], births[i], deaths[i], birth_cells[i], death_cells[i]
            ),
        )
        self._dims = dims[order]
        self._births = births[order]
        self._deaths = deaths[order]
        self._birth_cells = [birth_cells[i] for i in order]
        self._death_cells = [death_cells[i] for i in order]
        for array in (self._dims, self._births, self._deaths):
            array.setflags(write=False)

    @classmethod
    def from_pairs(cls, pairs, dim: int = 1) -> "PersistenceDiagram":
        """
        Build a single-dimension diagram from (birth, death) pairs.
        """
        pairs = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
        return cls([dim] * len(pairs), pairs[:, 0], pairs[:, 1])

    def __repr__(self):
        return f"<PersistenceDiagram-{len(self)} points>"

    def __len__(self):
        return len(self._dims)

    def __eq__(self, other):
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return (
            np.array_equal(self._dims, other._dims)
            and np.array_equal(self._births, other._births)
            and np.array_equal(self._deaths, other._deaths)
        )

    def __hash__(self):
        return hash((self._dims.tobytes(), self._births.tobytes(),
                     self._deaths.tobytes()))

    @property
    def dims(self) -> np.ndarray:
        return self._dims

    @property
    def births(self) -> np.ndarray:
        return self._births

    @property
    def deaths(self) -> np.ndarray:
        return self._deaths

    @property
    def birth_cells(self) -> List[Tuple[int, ...]]:
        return self._birth_cells

    @property
    def death_cells(self) -> List[Tuple[int, ...]]:
        return self._death_cells

    @property
    def persistence(self) -> np.ndarray:
        return self._deaths - self._births

    @property
    def total_persistence(self) -> float:
        return float(np.sum(self.persistence))

    @property
    def dimension(self) -> Optional[int]:
        """
        The only dimension present, ``None`` for empty or mixed diagrams.
        """
        present = np.unique(self._dims)
        return int(present[0]) if len(present) == 1 else None

    def is_empty(self) -> bool:
        return len(self) == 0

    def finite_array(self) -> np.ndarray:
        """
        :return: (k, 2) array of (birth, death)
        """
        return np.column_stack([self._births, self._deaths]).reshape(-1, 2)

    def _subset(self, mask) -> "PersistenceDiagram":
        index = np.flatnonzero(mask)
        return PersistenceDiagram(
            self._dims[index],
            self._births[index],
            self._deaths[index],
            [self._birth_cells[i] for i in index],
            [self._death_cells[i] for i in index],
        )

    def in_dimension(self, dim: int) -> "PersistenceDiagram":
        return self._subset(self._dims == dim)

    def in_dimensions(self, dims) -> "PersistenceDiagram":
        return self._subset(np.isin(self._dims, list(dims)))

    def without_degenerate(self, threshold: float) -> "PersistenceDiagram":
        """
        Drop points whose persistence is below ``threshold``.
        """
        return self._subset(self.persistence >= threshold)
