# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

import csv
import json
import os
from pathlib import Path
from typing import List, Sequence

import numpy as np
from PIL import Image
from scipy import ndimage

from topocell import config
from topocell.core.struct.layoutobject import CellLayout, RasterLayout
from topocell.core.struct.reportobject import CountReport
from topocell.errors import (
    LayoutFormatError,
    LayoutParseError,
    LayoutValidationError,
    PairingError,
)
from topocell.utils.logger import get_logger

log = get_logger(__name__)

LAYOUT_HEADER = ["class", "x", "y"]
MASK_THRESHOLD = 128


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def load_layout(path) -> CellLayout:
    """
    Read a layout from its CSV file and JSON sidecar.

    The CSV holds a ``class,x,y`` header; the sidecar next to it (same stem,
    ``.json``) gives ``width``, ``height`` and the class names.

    :param path: path of the layout CSV
    :raises LayoutFormatError: missing or malformed sidecar, wrong header
    :raises LayoutParseError: a non-numeric class or coordinate
    :raises LayoutValidationError: out-of-range class id or point
    :return: the validated CellLayout
    """
    path = Path(path)
    meta_path = sidecar_path(path)
    if not meta_path.is_file():
        if not path.is_file():
            raise FileNotFoundError(f"Layout {path} does not exist.")
        raise LayoutFormatError(f"Missing sidecar {meta_path} for {path}.")

    with open(meta_path, "r") as meta_file:
        try:
            meta = json.load(meta_file)
        except json.JSONDecodeError as error:
            raise LayoutFormatError(
                f"Sidecar {meta_path} is not valid JSON: {error}"
            ) from error

    try:
        width = float(meta["width"])
        height = float(meta["height"])
        class_names = [str(name) for name in meta["classes"]]
    except (KeyError, TypeError, ValueError) as error:
        raise LayoutFormatError(
            f"Sidecar {meta_path} needs width, height and classes."
        ) from error

    points = [[] for _ in class_names]
    with open(path, "r", newline="") as layout_file:
        reader = csv.reader(layout_file)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != LAYOUT_HEADER:
            raise LayoutFormatError(
                f"{path} must start with the header 'class,x,y'."
            )

        for line_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise LayoutFormatError(
                    f"{path}:{line_number} has {len(row)} fields, expected 3."
                )
            try:
                class_id = int(row[0])
                x, y = float(row[1]), float(row[2])
            except ValueError as error:
                raise LayoutParseError(
                    f"{path}:{line_number} cannot be parsed: {row}"
                ) from error

            if not 0 <= class_id < len(class_names):
                raise LayoutValidationError(
                    f"{path}:{line_number} uses class {class_id}, "
                    f"but only {len(class_names)} classes are declared."
                )
            points[class_id].append((x, y))

    layout = CellLayout(width, height, class_names, points, source=str(path))
    log.debug(f"Loaded {path}: counts {layout.counts.tolist()}")
    return layout


def save_layout(layout: CellLayout, path) -> None:
    """
    Write a layout as CSV plus JSON sidecar.

    Coordinates are written with ``repr`` so that loading them again gives
    back the exact same floats.
    """
    path = Path(path)
    rows = [
        (class_id, repr(float(x)), repr(float(y)))
        for class_id, class_points in enumerate(layout.points)
        for x, y in class_points
    ]
    with open(path, "w", newline="") as layout_file:
        writer = csv.writer(layout_file, lineterminator="\n")
        writer.writerow(LAYOUT_HEADER)
        writer.writerows(rows)

    meta = {
        "width": layout.width,
        "height": layout.height,
        "classes": layout.class_names,
    }
    with open(sidecar_path(path), "w") as meta_file:
        json.dump(meta, meta_file, indent=4)


def list_layouts(directory) -> List[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Layout directory {directory} does not exist.")
    return sorted(
        directory / name
        for name in os.listdir(directory)
        if name.endswith(".csv")
    )


def load_layout_dir(directory) -> List[CellLayout]:
    """
    Load every ``*.csv`` layout of a directory in file-name order.
    """
    return [load_layout(path) for path in list_layouts(directory)]


def load_mask_images(paths: Sequence, class_names: Sequence[str] = None):
    """
    Read one 8-bit grayscale mask per class into a RasterLayout.

    Any pixel value >= 128 counts as foreground.

    :param paths: one image path per class, in class-id order
    :param class_names: optional labels, defaults to the file stems
    :return: RasterLayout
    """
    channels = []
    for path in paths:
        with Image.open(path) as image:
            channels.append(np.asarray(image.convert("L")) >= MASK_THRESHOLD)

    if len({channel.shape for channel in channels}) > 1:
        raise LayoutValidationError("Mask images differ in size.")

    if class_names is None:
        class_names = [Path(path).stem for path in paths]

    return RasterLayout(np.stack(channels).astype(np.uint8), class_names)


def footprint_centers(points: np.ndarray) -> np.ndarray:
    """
    Pixel holding the centre of every cell footprint.

    :param points: (k, 2) array of (x, y)
    :return: (k, 2) integer array of (row, col)
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    return np.floor(points[:, ::-1] + 0.5).astype(np.int64)


def stamp(shape, points: np.ndarray, footprint: int = config.FOOTPRINT):
    """
    Paint square footprints centred on the given points, clipped at borders.
    """
    grid = np.zeros(shape, dtype=np.uint8)
    if len(points) == 0:
        return grid

    centers = footprint_centers(points)
    half = footprint // 2
    for dr in range(-half, half + 1):
        for dc in range(-half, half + 1):
            rows = centers[:, 0] + dr
            cols = centers[:, 1] + dc
            inside = (
                (rows >= 0) & (rows < shape[0])
                & (cols >= 0) & (cols < shape[1])
            )
            grid[rows[inside], cols[inside]] = 1
    return grid


def rasterize(layout: CellLayout, footprint: int = config.FOOTPRINT):
    """
    Turn a point layout into per-class binary masks.

    Every cell becomes a ``footprint x footprint`` block of ones centred on
    its rounded position; overlapping blocks simply merge.

    :param layout: the CellLayout
    :param footprint: side of the square footprint, odd, default 3
    :return: RasterLayout
    """
    if footprint < 1 or footprint % 2 == 0:
        raise LayoutValidationError(
            f"Footprint side must be a positive odd number, got {footprint}."
        )
    channels = np.stack(
        [stamp(layout.shape, class_points, footprint)
         for class_points in layout.points]
    )
    return RasterLayout(channels, layout.class_names)


def aggregate(raster: RasterLayout) -> np.ndarray:
    """
    Union of all class channels into a single binary mask.
    """
    return raster.channels.max(axis=0).astype(np.uint8)


def count_components(grid: np.ndarray, connectivity: int = config.CONNECTIVITY):
    """
    Count the connected foreground components of a binary grid.

    :param grid: 2D binary array
    :param connectivity: 8 (default) or 4
    :return: number of components
    """
    if connectivity == 8:
        structure = np.ones((3, 3), dtype=bool)
    elif connectivity == 4:
        structure = ndimage.generate_binary_structure(2, 1)
    else:
        raise LayoutValidationError(
            f"Connectivity must be 4 or 8, got {connectivity}."
        )
    _, number = ndimage.label(np.asarray(grid) > 0, structure=structure)
    return int(number)


def component_counts(
    layout: CellLayout,
    connectivity: int = config.CONNECTIVITY,
    footprint: int = config.FOOTPRINT,
) -> np.ndarray:
    raster = rasterize(layout, footprint)
    return np.array(
        [count_components(raster.channel(i), connectivity)
         for i in range(raster.n_classes)],
        dtype=np.int64,
    )


def _layout_counts(layout, mode, connectivity):
    if mode == "points":
        return layout.counts
    if mode == "components":
        return component_counts(layout, connectivity)
    raise LayoutValidationError(
        f"Count mode must be 'points' or 'components', got {mode!r}."
    )


def count_metrics(
    real: Sequence[CellLayout],
    syn: Sequence[CellLayout],
    mode: str = "points",
    connectivity: int = config.CONNECTIVITY,
) -> CountReport:
    """
    Per-class cell count error (CCE) and total count error (TCE).

    ``cce_i = mean_j |c_real,j,i - c_syn,j,i|`` and
    ``tce = mean_j |sum_i c_real,j,i - sum_i c_syn,j,i|``.

    :param real: reference layouts
    :param syn: synthetic layouts, paired with ``real`` by position
    :param mode: count raw points or rasterized connected components
    :param connectivity: neighbourhood used in ``components`` mode
    :raises PairingError: different set sizes or class specs
    :return: CountReport
    """
    if len(real) != len(syn):
        raise PairingError(
            f"Cannot pair {len(real)} real layouts with {len(syn)} synthetic."
        )
    if len(real) == 0:
        raise PairingError("Count metrics need at least one layout pair.")
    for real_layout, syn_layout in zip(real, syn):
        if real_layout.class_names != syn_layout.class_names:
            raise PairingError(
                f"Class specs differ: {real_layout.class_names} "
                f"vs {syn_layout.class_names}."
            )

    samples = [
        (_layout_counts(r, mode, connectivity),
         _layout_counts(s, mode, connectivity))
        for r, s in zip(real, syn)
    ]
    real_counts = np.stack([r for r, _ in samples]).astype(np.float64)
    syn_counts = np.stack([s for _, s in samples]).astype(np.float64)

    cce = np.abs(real_counts - syn_counts).mean(axis=0)
    tce = float(
        np.abs(real_counts.sum(axis=1) - syn_counts.sum(axis=1)).mean()
    )
    return CountReport(cce, tce, samples, mode)
