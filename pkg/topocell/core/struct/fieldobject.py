# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

from typing import Optional, Tuple

import numpy as np


class ScalarField:
    """ScalarField holds a real value per pixel, here pixel distances"""

    __slots__ = ["_values"]

    def __init__(self, values: np.ndarray) -> None:
        values = np.array(values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("A scalar field must be two-dimensional.")
        values.setflags(write=False)
        self._values = values

    def __repr__(self):
        return f"<ScalarField-{self.width}x{self.height}>"

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def height(self) -> int:
        return self._values.shape[0]

    @property
    def width(self) -> int:
        return self._values.shape[1]

    def at(self, row: int, col: int) -> float:
        return float(self._values[row, col])


class NearestSiteMap:
    """
    For every pixel, the foreground pixel realising its distance value.

    ``owners`` optionally maps each foreground pixel to the index of the cell
    whose footprint produced it, so that distances can be traced back to cell
    centres.
    """

    __slots__ = ["site_rows", "site_cols", "owners"]

    def __init__(
        self,
        site_rows: np.ndarray,
        site_cols: np.ndarray,
        owners: Optional[np.ndarray] = None,
    ) -> None:
        self.site_rows = site_rows
        self.site_cols = site_cols
        self.owners = owners

    def site(self, row: int, col: int) -> Tuple[int, int]:
        return int(self.site_rows[row, col]), int(self.site_cols[row, col])

    def owner(self, row: int, col: int) -> int:
        """
        Cell owning the nearest site of a pixel, -1 when unknown.
        """
        if self.owners is None:
            return -1
        site_row, site_col = self.site(row, col)
        return int(self.owners[site_row, site_col])
