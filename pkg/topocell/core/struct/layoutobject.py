# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from topocell.errors import LayoutValidationError, PairingError


@dataclass(frozen=True)
class ClassSpec:
    """
    One cell type of a layout.
    """

    class_id: int
    name: str
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise LayoutValidationError("A layout needs at least one class.")
        if not 0 <= self.class_id < self.n:
            raise LayoutValidationError(
                f"Class id {self.class_id} is outside [0, {self.n})."
            )


def build_class_specs(names: Sequence[str]) -> Tuple[ClassSpec, ...]:
    names = [str(name) for name in names]
    if not names:
        raise LayoutValidationError("A layout needs at least one class.")
    return tuple(
        ClassSpec(class_id, name, len(names))
        for class_id, name in enumerate(names)
    )


class CellLayout:
    """CellLayout stores the per-class cell centres on a fixed canvas"""

    __slots__ = ["_width", "_height", "_classes", "_points", "source"]

    def __init__(
        self,
        width: int,
        height: int,
        class_names: Sequence[str],
        points: Sequence[np.ndarray],
        source: str = None,
    ) -> None:
        """Build and validate a layout.

        :param width: canvas width in pixels
        :param height: canvas height in pixels
        :param class_names: one label per class, in class-id order
        :param points: one (c_i, 2) array of (x, y) centres per class
        :param source: optional file the layout was read from
        :raises LayoutValidationError: on any broken invariant
        """
        for size in (width, height):
            if not np.isfinite(size) or float(size) != int(size):
                raise LayoutValidationError(
                    f"Canvas size {size!r} is not a whole number of pixels."
                )
        if int(width) < 1 or int(height) < 1:
            raise LayoutValidationError(
                f"Canvas {width}x{height} must be at least 1x1."
            )
        self._width = int(width)
        self._height = int(height)
        self._classes = build_class_specs(class_names)

        if len(points) != len(self._classes):
            raise LayoutValidationError(
                f"Got {len(points)} point sets for "
                f"{len(self._classes)} classes."
            )

        self._points = []
        for class_id, class_points in enumerate(points):
            array = np.array(class_points, dtype=np.float64).reshape(-1, 2)
            self._check_bounds(class_id, array)
            array.setflags(write=False)
            self._points.append(array)

        self.source = source

    def _check_bounds(self, class_id, array):
        if not np.all(np.isfinite(array)):
            raise LayoutValidationError(
                f"Class {class_id} holds non-finite coordinates."
            )
        outside = (
            (array[:, 0] < 0)
            | (array[:, 0] >= self._width)
            | (array[:, 1] < 0)
            | (array[:, 1] >= self._height)
        )
        if np.any(outside):
            x, y = array[np.argmax(outside)]
            raise LayoutValidationError(
                f"Point ({x}, {y}) of class {class_id} lies outside the "
                f"{self._width}x{self._height} canvas."
            )

    def __repr__(self):
        return (
            f"<CellLayout-{self._width}x{self._height} "
            f"counts={self.counts.tolist()}>"
        )

    @property
    def width(self) -> int:
        return self._width

    @property
    def height(self) -> int:
        return self._height

    @property
    def shape(self) -> Tuple[int, int]:
        """
        Canvas shape in numpy order.

        :return: (height, width)
        """
        return self._height, self._width

    @property
    def classes(self) -> Tuple[ClassSpec, ...]:
        return self._classes

    @property
    def class_names(self) -> List[str]:
        return [spec.name for spec in self._classes]

    @property
    def n_classes(self) -> int:
        return len(self._classes)

    @property
    def points(self) -> List[np.ndarray]:
        return list(self._points)

    @property
    def counts(self) -> np.ndarray:
        """
        The condition vector: number of cells of every class.

        :return: integer array of length n
        """
        return np.array([len(p) for p in self._points], dtype=np.int64)

    @property
    def diagonal(self) -> float:
        return float(np.hypot(self._width, self._height))

    def points_of(self, class_id: int) -> np.ndarray:
        return self._points[class_id]

    def stacked(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        All centres in one array, with the class of every row.

        :return: ((N, 2) coordinates, (N,) class ids)
        """
        if sum(len(p) for p in self._points) == 0:
            return np.zeros((0, 2)), np.zeros(0, dtype=np.int64)
        coordinates = np.concatenate(self._points, axis=0)
        labels = np.concatenate(
            [np.full(len(p), i, dtype=np.int64)
             for i, p in enumerate(self._points)]
        )
        return coordinates, labels

    def with_points(self, points: Sequence[np.ndarray]) -> "CellLayout":
        return CellLayout(
            self._width, self._height, self.class_names, points, self.source
        )

    def same_frame(self, other: "CellLayout") -> bool:
        return (
            self.shape == other.shape
            and self.class_names == other.class_names
        )

    def require_same_frame(self, other: "CellLayout") -> None:
        if not self.same_frame(other):
            raise PairingError(
                f"Layouts disagree on canvas or classes: {self.shape} "
                f"{self.class_names} vs {other.shape} {other.class_names}."
            )


class RasterLayout:
    """RasterLayout keeps one binary mask per class"""

    __slots__ = ["_channels", "_class_names"]

    def __init__(self, channels: np.ndarray, class_names: Sequence[str]):
        channels = np.asarray(channels)
        if channels.ndim != 3:
            raise LayoutValidationError(
                "Raster channels must be shaped (n, height, width)."
            )
        if channels.shape[0] != len(class_names):
            raise LayoutValidationError(
                f"Got {channels.shape[0]} channels for "
                f"{len(class_names)} classes."
            )
        if not np.isin(channels, (0, 1)).all():
            raise LayoutValidationError("Raster channels must be binary.")

        self._channels = channels.astype(np.uint8)
        self._channels.setflags(write=False)
        self._class_names = [str(name) for name in class_names]

    def __repr__(self):
        return (
            f"<RasterLayout-{self.width}x{self.height} "
            f"foreground={self.foreground_counts().tolist()}>"
        )

    @property
    def channels(self) -> np.ndarray:
        return self._channels

    @property
    def class_names(self) -> List[str]:
        return list(self._class_names)

    @property
    def n_classes(self) -> int:
        return self._channels.shape[0]

    @property
    def height(self) -> int:
        return self._channels.shape[1]

    @property
    def width(self) -> int:
        return self._channels.shape[2]

    def channel(self, class_id: int) -> np.ndarray:
        return self._channels[class_id]

    def foreground_counts(self) -> np.ndarray:
        return self._channels.reshape(self.n_classes, -1).sum(axis=1)
