# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

"""
Exact Euclidean distance transform with nearest-site tracking.

Squared distances are integers, so the two-pass lower-envelope transform is
carried out exactly in float64; the site map then records, for each pixel,
the lexicographically smallest (row, col) foreground pixel at that distance.
"""

import math
from typing import Tuple

import numpy as np
from numba import njit

from topocell import config
from topocell.core.layout import footprint_centers
from topocell.core.struct.fieldobject import NearestSiteMap, ScalarField
from topocell.errors import EmptyForegroundError
from topocell.utils.logger import get_logger

log = get_logger(__name__)


@njit(cache=True)
def _column_pass(foreground):
    height, width = foreground.shape
    nearest = np.full((height, width), -1, dtype=np.int64)
    for col in range(width):
        last = -1
        for row in range(height):
            if foreground[row, col]:
                last = row
            nearest[row, col] = last
        following = -1
        for row in range(height - 1, -1, -1):
            if foreground[row, col]:
                following = row
            if following >= 0:
                above = nearest[row, col]
                # on a tie the upper site is kept
                if above < 0 or following - row < row - above:
                    nearest[row, col] = following
    return nearest


@njit(cache=True)
def _row_pass(nearest):
    height, width = nearest.shape
    squared = np.zeros((height, width), dtype=np.float64)
    f = np.zeros(width, dtype=np.float64)
    cols = np.zeros(width, dtype=np.int64)
    v = np.zeros(width, dtype=np.int64)
    z = np.zeros(width + 1, dtype=np.float64)

    for row in range(height):
        n = 0
        for col in range(width):
            if nearest[row, col] >= 0:
                d = row - nearest[row, col]
                f[col] = d * d
                cols[n] = col
                n += 1

        k = 0
        v[0] = cols[0]
        z[0] = -np.inf
        z[1] = np.inf
        for idx in range(1, n):
            q = cols[idx]
            while True:
                p = v[k]
                s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p))
                if s <= z[k]:
                    k -= 1
                else:
                    break
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = np.inf

        k = 0
        for col in range(width):
            while z[k + 1] < col:
                k += 1
            d = col - v[k]
            squared[row, col] = d * d + f[v[k]]
    return squared


@njit(cache=True)
def _resolve_sites(nearest, squared):
    height, width = nearest.shape
    site_rows = np.zeros((height, width), dtype=np.int64)
    site_cols = np.zeros((height, width), dtype=np.int64)
    for row in range(height):
        for col in range(width):
            target = squared[row, col]
            reach = int(math.floor(math.sqrt(target))) + 1
            best_row = -1
            best_col = -1
            for q in range(max(0, col - reach), min(width, col + reach + 1)):
                r = nearest[row, q]
                if r < 0:
                    continue
                value = (col - q) * (col - q) + (row - r) * (row - r)
                if value == target:
                    if best_row < 0 or r < best_row or (
                        r == best_row and q < best_col
                    ):
                        best_row = r
                        best_col = q
            site_rows[row, col] = best_row
            site_cols[row, col] = best_col
    return site_rows, site_cols


def exact_edt(grid: np.ndarray, owners: np.ndarray = None):
    """
    Exact Euclidean distance from every pixel to the nearest foreground pixel.

    :param grid: 2D binary array, foreground != 0
    :param owners: optional per-pixel owning cell index of the foreground
    :raises EmptyForegroundError: the grid has no foreground pixel
    :return: (ScalarField, NearestSiteMap)
    """
    foreground = np.ascontiguousarray(np.asarray(grid) != 0)
    if foreground.ndim != 2:
        raise ValueError("The distance transform expects a 2D grid.")
    if not foreground.any():
        raise EmptyForegroundError(
            "The grid has no foreground pixel; distances would be infinite."
        )

    nearest = _column_pass(foreground)
    squared = _row_pass(nearest)
    site_rows, site_cols = _resolve_sites(nearest, squared)
    return ScalarField(np.sqrt(squared)), NearestSiteMap(
        site_rows, site_cols, owners
    )


def footprint_owners(
    points: np.ndarray,
    shape: Tuple[int, int],
    footprint: int = config.FOOTPRINT,
) -> np.ndarray:
    """
    Map each footprint pixel to the cell that produced it.

    Where footprints overlap, the cell with the nearest centre wins, and the
    lowest index wins among equally near centres.

    :param points: (k, 2) array of (x, y) centres
    :param shape: (height, width)
    :return: int64 grid, -1 outside every footprint
    """
    owners = np.full(shape, -1, dtype=np.int64)
    best = np.full(shape, np.inf)
    half = footprint // 2
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)

    for index, (center, (x, y)) in enumerate(
        zip(footprint_centers(points), points)
    ):
        for row in range(center[0] - half, center[0] + half + 1):
            if not 0 <= row < shape[0]:
                continue
            for col in range(center[1] - half, center[1] + half + 1):
                if not 0 <= col < shape[1]:
                    continue
                distance = math.hypot(col - x, row - y)
                if distance < best[row, col]:
                    best[row, col] = distance
                    owners[row, col] = index
    return owners


def _offsets(point, shape, footprint):
    center = footprint_centers(point)[0]
    half = footprint // 2
    for dr in range(-half, half + 1):
        for dc in range(-half, half + 1):
            row, col = center[0] + dr, center[1] + dc
            if shape is None or (0 <= row < shape[0] and 0 <= col < shape[1]):
                yield dc, dr


def continuous_distance(
    points: np.ndarray,
    pixel: Tuple[float, float],
    footprint: int = config.FOOTPRINT,
    shape: Tuple[int, int] = None,
) -> float:
    """
    Distance from a pixel to the nearest footprint pixel, with footprints
    following their cell centres continuously instead of snapping to the
    grid.

    It equals the distance transform value whenever every centre sits on a
    pixel, and it is the function whose derivative
    :func:`edt_point_gradient` returns.

    :param points: (k, 2) array of (x, y) centres
    :param pixel: (x, y) of the pixel
    :param shape: canvas (height, width); footprint pixels outside are dropped
    :return: the distance, ``inf`` without any cell
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    px, py = pixel
    best = math.inf
    for point in points:
        for ox, oy in _offsets(point, shape, footprint):
            best = min(best, math.hypot(px - point[0] - ox, py - point[1] - oy))
    return best


def edt_point_gradient(
    field: ScalarField,
    sites: NearestSiteMap,
    points: np.ndarray,
    pixel: Tuple[int, int],
):
    """
    Derivative of the distance value of one pixel with respect to the cell
    centres.

    Only the cell owning the nearest site moves the value; its gradient is
    the unit vector pointing from the pixel towards that site.

    :param field: the distance field
    :param sites: nearest-site map of the same transform
    :param points: (k, 2) centres of the cells that produced the foreground
    :param pixel: (x, y) of a pixel
    :return: ((k, 2) gradient array, differentiable flag); a foreground pixel
        is not differentiable and yields zeros with the flag unset
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    gradient = np.zeros_like(points)
    col, row = int(pixel[0]), int(pixel[1])
    if field.at(row, col) == 0.0 or len(points) == 0:
        return gradient, False

    site_row, site_col = sites.site(row, col)
    owner = sites.owner(row, col)
    if owner < 0:
        centers = footprint_centers(points)
        owner = int(np.argmin(
            np.hypot(centers[:, 0] - site_row, centers[:, 1] - site_col)
        ))

    center = footprint_centers(points[owner])[0]
    site_x = points[owner, 0] + (site_col - center[1])
    site_y = points[owner, 1] + (site_row - center[0])
    dx, dy = col - site_x, row - site_y
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        return gradient, False

    gradient[owner] = (-dx / norm, -dy / norm)
    return gradient, True


def subpixel_field(
    field: ScalarField,
    sites: NearestSiteMap,
    points: np.ndarray,
) -> ScalarField:
    """
    Distance field whose footprints follow their cell centres continuously.

    Every pixel keeps the nearest site found by the exact transform, but
    that site is shifted by the sub-pixel offset of the cell that owns it.
    For centres sitting on pixels the result equals ``field``; elsewhere it
    is the value whose derivative :func:`edt_point_gradient` returns.

    :param sites: a site map carrying ``owners``
    :param points: (k, 2) centres the owners index into
    """
    if sites.owners is None:
        raise ValueError("A sub-pixel field needs a site map with owners.")
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    offsets = points[:, ::-1] - footprint_centers(points)

    owner = sites.owners[sites.site_rows, sites.site_cols]
    rows, cols = np.indices(field.values.shape)
    shift = np.where(owner[..., None] >= 0, offsets[np.maximum(owner, 0)], 0.0)
    d_row = rows - sites.site_rows - shift[..., 0]
    d_col = cols - sites.site_cols - shift[..., 1]
    return ScalarField(np.hypot(d_row, d_col))
