# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

"""
Persistent homology in dimensions 0 and 1.

Two filtrations are supported: Vietoris-Rips on planar point clouds and the
sublevel filtration of a scalar field on a cubical grid. Cells with equal
filtration value are ordered by dimension and then lexicographically by
their vertex indices, which fixes every pairing.
"""

import csv
from itertools import chain, combinations
from pathlib import Path
from typing import Dict, Sequence

import numpy as np
from numba import njit
from scipy.spatial.distance import pdist, squareform

from topocell.core.struct.diagramobject import (
    CUBICAL,
    RIPS,
    FiltrationSpec,
    PersistenceDiagram,
)
from topocell.core.struct.fieldobject import ScalarField
from topocell.errors import DiagramError, LayoutFormatError, LayoutParseError
from topocell.utils.logger import get_logger

log = get_logger(__name__)

DIAGRAM_HEADER = ["dim", "birth", "death"]
PROVENANCE_HEADER = ["b_cell", "d_cell"]


@njit(cache=True)
def _find(parent, node):
    while parent[node] != node:
        parent[node] = parent[parent[node]]
        node = parent[node]
    return node


@njit(cache=True)
def _elder_merge(node_rank, edge_u, edge_v):
    """
    Union-find over edges given in filtration order.

    Every component is represented by its oldest node, the one with the
    lowest rank. When an edge joins two components the younger one dies.

    :return: per edge, the representative that died there, or -1
    """
    parent = np.arange(node_rank.shape[0])
    dying = np.full(edge_u.shape[0], -1, dtype=np.int64)
    for e in range(edge_u.shape[0]):
        root_u = _find(parent, edge_u[e])
        root_v = _find(parent, edge_v[e])
        if root_u == root_v:
            continue
        if node_rank[root_u] < node_rank[root_v]:
            parent[root_v] = root_u
            dying[e] = root_v
        else:
            parent[root_u] = root_v
            dying[e] = root_u
    return dying


def _cubical_cells(values):
    height, width = values.shape
    flat = values.reshape(-1)
    index = np.arange(height * width).reshape(height, width)

    # vertex order: value, then index
    vertex_order = np.lexsort((np.arange(flat.size), flat))
    vertex_rank = np.empty(flat.size, dtype=np.int64)
    vertex_rank[vertex_order] = np.arange(flat.size)

    edge_u = np.concatenate(
        [index[:, :-1].reshape(-1), index[:-1, :].reshape(-1)]
    )
    edge_v = np.concatenate(
        [index[:, 1:].reshape(-1), index[1:, :].reshape(-1)]
    )
    edge_value = np.maximum(flat[edge_u], flat[edge_v])
    edge_order = np.lexsort((edge_v, edge_u, edge_value))
    edge_u, edge_v, edge_value = (
        edge_u[edge_order], edge_v[edge_order], edge_value[edge_order]
    )
    edge_critical = np.where(
        vertex_rank[edge_u] > vertex_rank[edge_v], edge_u, edge_v
    )
    return flat, vertex_rank, edge_u, edge_v, edge_value, edge_critical


def _cubical_h0(flat, vertex_rank, edge_u, edge_v, edge_value, edge_critical):
    dying = _elder_merge(vertex_rank, edge_u, edge_v)
    merges = np.flatnonzero(dying >= 0)
    born = dying[merges]
    return (
        flat[born],
        edge_value[merges],
        born,
        edge_critical[merges],
    )


def _cubical_h1(values, flat, vertex_rank, edge_u, edge_v, edge_value,
                edge_critical):
    """
    H1 through the dual graph: squares plus one outer node, joined by the
    edges they share, processed in reverse filtration order. The outer node
    is older than every square and never dies.
    """
    height, width = values.shape
    if height < 2 or width < 2:
        return (np.empty(0), np.empty(0),
                np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))

    square_rows, square_cols = np.meshgrid(
        np.arange(height - 1), np.arange(width - 1), indexing="ij"
    )
    square_rows = square_rows.reshape(-1)
    square_cols = square_cols.reshape(-1)
    corners = np.stack([
        square_rows * width + square_cols,
        square_rows * width + square_cols + 1,
        (square_rows + 1) * width + square_cols,
        (square_rows + 1) * width + square_cols + 1,
    ])
    square_value = flat[corners].max(axis=0)
    square_critical = corners[
        np.argmax(vertex_rank[corners], axis=0), np.arange(corners.shape[1])
    ]
    n_squares = square_value.size

    square_order = np.lexsort((corners[0], square_value))
    square_rank = np.empty(n_squares, dtype=np.int64)
    square_rank[square_order] = np.arange(n_squares)

    outer = n_squares
    node_rank = np.concatenate([-square_rank, [-(n_squares + 1)]])

    square_index = np.arange(n_squares).reshape(height - 1, width - 1)
    u_row, u_col = np.divmod(edge_u, width)
    horizontal = edge_v == edge_u + 1

    def square_at(rows, cols):
        inside = (rows >= 0) & (rows < height - 1) & (cols >= 0) & (
            cols < width - 1
        )
        result = np.full(rows.shape, outer, dtype=np.int64)
        result[inside] = square_index[rows[inside], cols[inside]]
        return result

    # horizontal edge (r,c)-(r,c+1) bounds squares (r-1,c) and (r,c);
    # vertical edge (r,c)-(r+1,c) bounds squares (r,c-1) and (r,c)
    side_a = np.where(
        horizontal,
        square_at(u_row - 1, u_col),
        square_at(u_row, u_col - 1),
    )
    side_b = square_at(u_row, u_col)

    reverse = np.arange(edge_u.size)[::-1]
    dying = _elder_merge(
        node_rank, side_a[reverse].copy(), side_b[reverse].copy()
    )
    merges = np.flatnonzero(dying >= 0)
    edges = reverse[merges]
    killed = dying[merges]
    return (
        edge_value[edges],
        square_value[killed],
        edge_critical[edges],
        square_critical[killed],
    )


def cubical_sublevel_diagram(field, spec: FiltrationSpec = None):
    """
    Persistence diagram of the sublevel filtration ``{f <= t}`` of a field.

    Pixels are the vertices of a cubical complex; edges join 4-neighbours and
    squares fill 2x2 blocks, each taking the maximum of its vertex values.
    The essential class and zero-persistence pairs are left out. Every point
    records the pixel (row, col) whose value is its birth and the one whose
    value is its death.

    :param field: ScalarField or 2D array of finite reals
    :param spec: optional FiltrationSpec, only ``max_dimension`` is used
    :return: PersistenceDiagram
    """
    values = field.values if isinstance(field, ScalarField) else field
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.ndim != 2 or values.size == 0:
        raise DiagramError("A cubical filtration needs a non-empty 2D grid.")
    if not np.all(np.isfinite(values)):
        raise DiagramError("The field contains non-finite values.")
    max_dimension = 1 if spec is None else spec.max_dimension

    width = values.shape[1]
    cells = _cubical_cells(values)
    parts = [(0, _cubical_h0(*cells))]
    if max_dimension >= 1:
        parts.append((1, _cubical_h1(values, *cells)))

    dims, births, deaths, birth_cells, death_cells = [], [], [], [], []
    for dim, (birth, death, birth_pixel, death_pixel) in parts:
        keep = death > birth
        dims.extend([dim] * int(keep.sum()))
        births.extend(birth[keep])
        deaths.extend(death[keep])
        birth_cells.extend(divmod(int(p), width) for p in birth_pixel[keep])
        death_cells.extend(divmod(int(p), width) for p in death_pixel[keep])

    return PersistenceDiagram(dims, births, deaths, birth_cells, death_cells)


def _rips_edges(points, max_scale):
    n = len(points)
    rows, cols = np.triu_indices(n, k=1)
    lengths = pdist(points)
    keep = lengths <= max_scale
    rows, cols, lengths = rows[keep], cols[keep], lengths[keep]
    order = np.lexsort((cols, rows, lengths))
    return rows[order], cols[order], lengths[order]


def _triangles(n):
    count = n * (n - 1) * (n - 2) // 6
    flat = np.fromiter(
        chain.from_iterable(combinations(range(n), 3)),
        dtype=np.int64,
        count=3 * count,
    )
    return flat.reshape(-1, 3).T


def _rips_h1(points, distances, edge_rows, edge_cols, edge_lengths,
             positive, max_scale):
    n = len(points)
    edge_rank = np.full((n, n), -1, dtype=np.int64)
    edge_rank[edge_rows, edge_cols] = np.arange(edge_rows.size)
    edge_rank[edge_cols, edge_rows] = np.arange(edge_rows.size)

    i, j, k = _triangles(n)
    diameter = np.maximum(
        np.maximum(distances[i, j], distances[i, k]), distances[j, k]
    )
    keep = diameter <= max_scale
    i, j, k, diameter = i[keep], j[keep], k[keep], diameter[keep]
    order = np.lexsort((k, j, i, diameter))
    i, j, k, diameter = i[order], j[order], k[order], diameter[order]
    faces = np.stack(
        [edge_rank[i, j], edge_rank[i, k], edge_rank[j, k]], axis=1
    )

    remaining = int(positive.sum())
    pivot_of = {}
    pairs = []
    for t in range(len(diameter)):
        if remaining == 0:
            break
        column = set(int(f) for f in faces[t])
        while column:
            pivot = max(column)
            if pivot not in pivot_of:
                pivot_of[pivot] = column
                pairs.append((pivot, t))
                remaining -= 1
                break
            column ^= pivot_of[pivot]

    births, deaths, birth_cells, death_cells = [], [], [], []
    for edge, t in pairs:
        births.append(edge_lengths[edge])
        deaths.append(diameter[t])
        birth_cells.append((edge_rows[edge], edge_cols[edge]))
        death_cells.append((i[t], j[t], k[t]))
    return births, deaths, birth_cells, death_cells


def rips_diagram(points, spec: FiltrationSpec = None, diagonal: float = None):
    """
    Persistence diagram of the Vietoris-Rips filtration of a planar point
    cloud, edges entering at their Euclidean length.

    H0 bars are born at 0 and die at merge lengths; H1 bars are born at an
    edge length and die at a triangle diameter. Classes still alive at
    ``max_scale`` and zero-persistence pairs are left out.

    :param points: (k, 2) array of coordinates
    :param spec: FiltrationSpec; its ``max_scale`` defaults to ``diagonal``
    :param diagonal: fallback truncation scale, infinite when not given
    :raises DiagramError: on a non-positive max_scale
    :return: PersistenceDiagram
    """
    spec = spec or FiltrationSpec(RIPS)
    if spec.mode != RIPS:
        raise DiagramError(f"rips_diagram got a {spec.mode} filtration spec.")
    max_scale = spec.max_scale
    if max_scale is None:
        max_scale = np.inf if diagonal is None else float(diagonal)
    if not max_scale > 0:
        raise DiagramError(f"Rips max_scale must be positive, got {max_scale}.")

    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if not np.all(np.isfinite(points)):
        raise DiagramError("Point coordinates must be finite.")
    n = len(points)
    if n < 2:
        return PersistenceDiagram()

    edge_rows, edge_cols, edge_lengths = _rips_edges(points, max_scale)
    dying = _elder_merge(np.arange(n), edge_rows, edge_cols)
    merges = dying >= 0

    dims = [0] * int(merges.sum())
    births = [0.0] * len(dims)
    deaths = list(edge_lengths[merges])
    birth_cells = [(int(v),) for v in dying[merges]]
    death_cells = [
        (int(a), int(b))
        for a, b in zip(edge_rows[merges], edge_cols[merges])
    ]

    if spec.max_dimension >= 1 and n >= 3:
        h1 = _rips_h1(
            points, squareform(pdist(points)), edge_rows, edge_cols,
            edge_lengths, ~merges, max_scale,
        )
        dims.extend([1] * len(h1[0]))
        births.extend(h1[0])
        deaths.extend(h1[1])
        birth_cells.extend(h1[2])
        death_cells.extend(h1[3])

    births = np.asarray(births, dtype=np.float64)
    deaths = np.asarray(deaths, dtype=np.float64)
    keep = np.flatnonzero(deaths > births)
    log.debug(f"Rips diagram of {n} points: {len(keep)} finite bars")
    return PersistenceDiagram(
        np.asarray(dims)[keep],
        births[keep],
        deaths[keep],
        [birth_cells[x] for x in keep],
        [death_cells[x] for x in keep],
    )


def diagram(source, spec: FiltrationSpec, diagonal: float = None):
    """
    Dispatch on ``spec.mode``: a point cloud for Rips, a field for cubical.
    """
    if spec.mode == CUBICAL:
        return cubical_sublevel_diagram(source, spec)
    return rips_diagram(source, spec, diagonal)


def betti_curve(
    diagram: PersistenceDiagram, thresholds: Sequence[float]
) -> Dict[int, np.ndarray]:
    """
    Number of bars alive at each threshold, ``birth <= t < death``.

    :return: {0: counts, 1: counts}
    """
    thresholds = np.asarray(thresholds, dtype=np.float64).reshape(-1, 1)
    curves = {}
    for dim in (0, 1):
        mask = diagram.dims == dim
        births = diagram.births[mask]
        deaths = diagram.deaths[mask]
        alive = (births <= thresholds) & (thresholds < deaths)
        curves[dim] = alive.sum(axis=1).astype(np.int64)
    return curves


def euler_characteristic(grid: np.ndarray) -> int:
    """
    Vertices minus edges plus squares of the cubical complex spanned by the
    foreground pixels of a binary grid.
    """
    grid = np.asarray(grid) != 0
    vertices = int(grid.sum())
    edges = int((grid[:, :-1] & grid[:, 1:]).sum()) + int(
        (grid[:-1, :] & grid[1:, :]).sum()
    )
    squares = int(
        (grid[:-1, :-1] & grid[:-1, 1:] & grid[1:, :-1] & grid[1:, 1:]).sum()
    )
    return vertices - edges + squares


def _cell_text(cell):
    return ":".join(str(v) for v in cell)


def _cell_tuple(text):
    return tuple(int(v) for v in text.split(":")) if text else ()


def save_diagram(diagram: PersistenceDiagram, path, provenance=False) -> None:
    """
    Write a diagram as ``dim,birth,death`` CSV, optionally followed by the
    ``b_cell,d_cell`` provenance columns (indices joined with ``:``).
    """
    header = DIAGRAM_HEADER + (PROVENANCE_HEADER if provenance else [])
    with open(path, "w", newline="") as diagram_file:
        writer = csv.writer(diagram_file, lineterminator="\n")
        writer.writerow(header)
        for index in range(len(diagram)):
            row = [
                int(diagram.dims[index]),
                repr(float(diagram.births[index])),
                repr(float(diagram.deaths[index])),
            ]
            if provenance:
                row += [
                    _cell_text(diagram.birth_cells[index]),
                    _cell_text(diagram.death_cells[index]),
                ]
            writer.writerow(row)


def load_diagram(path) -> PersistenceDiagram:
    path = Path(path)
    with open(path, "r", newline="") as diagram_file:
        reader = csv.reader(diagram_file)
        header = next(reader, None)
        if header is None or header[:3] != DIAGRAM_HEADER:
            raise LayoutFormatError(
                f"{path} must start with the header 'dim,birth,death'."
            )
        with_cells = header[3:5] == PROVENANCE_HEADER
        dims, births, deaths, birth_cells, death_cells = [], [], [], [], []
        for line_number, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                dims.append(int(row[0]))
                births.append(float(row[1]))
                deaths.append(float(row[2]))
                birth_cells.append(_cell_tuple(row[3]) if with_cells else ())
                death_cells.append(_cell_tuple(row[4]) if with_cells else ())
            except (ValueError, IndexError) as error:
                raise LayoutParseError(
                    f"{path}:{line_number} cannot be parsed: {row}"
                ) from error
    return PersistenceDiagram(dims, births, deaths, birth_cells, death_cells)
