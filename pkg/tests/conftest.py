# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

import numpy as np
import pytest

from topocell.core.layout import save_layout
from topocell.core.struct.layoutobject import CellLayout


def ring(cx, cy, radius, m, phase=0.0):
    angles = phase + 2.0 * np.pi * np.arange(m) / m
    return np.column_stack(
        [cx + radius * np.cos(angles), cy + radius * np.sin(angles)]
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture()
def two_class_layout():
    return CellLayout(
        64,
        48,
        ["tumor", "stroma"],
        [
            np.array([[10.0, 10.0], [20.5, 12.25], [30.0, 40.0]]),
            np.array([[50.0, 5.0]]),
        ],
    )


@pytest.fixture()
def ring_layout():
    """One ring of 12 cells per class, far apart."""

    def build(m=(12, 12), radius=12.0, width=96, height=48):
        return CellLayout(
            width,
            height,
            ["c0", "c1"],
            [ring(24, 24, radius, m[0]), ring(72, 24, radius, m[1])],
        )

    return build


@pytest.fixture()
def layout_dir(tmp_path):
    """Write layouts to a fresh directory and return its path."""

    def write(name, layouts):
        directory = tmp_path / name
        directory.mkdir()
        for index, layout in enumerate(layouts):
            save_layout(layout, directory / f"layout_{index:03d}.csv")
        return directory

    return write
