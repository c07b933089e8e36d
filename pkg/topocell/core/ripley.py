# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

"""
Ripley K and cross-K estimates, and paired t-tests comparing them between
real and synthetic layouts.
"""

from typing import List, Sequence

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import ttest_rel

from topocell import config
from topocell.core.struct.layoutobject import CellLayout
from topocell.core.struct.reportobject import KReport
from topocell.errors import InsufficientDataError, PairingError, ParameterError
from topocell.utils.logger import get_logger

log = get_logger(__name__)

ESTIMATOR_NAIVE = "K(r) = A / (Na * Nb') * #{(i, j): d_ij <= r}, no edge correction"
ESTIMATOR_BORDER = (
    "K(r) = A / (Na(r) * Nb') * #{(i, j): i at >= r from the border, "
    "d_ij <= r}, border (reduced-sample) correction"
)


def check_radii(radii: Sequence[float]) -> np.ndarray:
    radii = np.asarray(radii, dtype=np.float64).reshape(-1)
    if len(radii) == 0 or np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ParameterError(
            f"Radii must be positive and strictly increasing, got {radii.tolist()}."
        )
    return radii


def ripley_k(
    layout: CellLayout,
    class_a: int,
    class_b: int,
    radii: Sequence[float] = config.KSTATS_RADII,
    border: bool = False,
) -> np.ndarray:
    """
    Ripley K of class ``a`` around itself, or cross-K of ``b`` around ``a``.

    ``K(r) = A / (Na * Nb') * (number of ordered pairs closer than r)``
    with ``Nb' = Nb`` for two classes and ``Na - 1`` for one. With
    ``border`` only cells of ``a`` at least ``r`` away from the canvas edge
    serve as centres.

    :return: one estimate per radius, NaN where undefined (fewer than two
        cells for K, an empty class for cross-K)
    """
    radii = check_radii(radii)
    first = layout.points_of(class_a)
    second = layout.points_of(class_b)
    univariate = class_a == class_b
    others = len(first) - 1 if univariate else len(second)
    if len(first) == 0 or others < 1:
        log.debug(
            f"K undefined for classes {class_a}-{class_b}: "
            f"{len(first)} and {len(second)} cells"
        )
        return np.full(len(radii), np.nan)

    distances = cdist(first, second)
    if univariate:
        np.fill_diagonal(distances, np.inf)
    area = float(layout.width * layout.height)

    if not border:
        within = (distances[:, :, None] <= radii).sum(axis=(0, 1))
        return area / (len(first) * others) * within

    edge = np.minimum.reduce([
        first[:, 0], layout.width - first[:, 0],
        first[:, 1], layout.height - first[:, 1],
    ])
    estimates = np.full(len(radii), np.nan)
    for index, radius in enumerate(radii):
        focal = edge >= radius
        if not focal.any():
            continue
        within = (distances[focal] <= radius).sum()
        estimates[index] = area / (focal.sum() * others) * within
    return estimates


def class_pairs(n_classes: int) -> List[tuple]:
    """
    Ordered class pairs, the n same-class pairs first, then the
    ``n (n - 1)`` cross pairs.
    """
    same = [(a, a) for a in range(n_classes)]
    cross = [(a, b) for a in range(n_classes) for b in range(n_classes)
             if a != b]
    return same + cross


def paired_p_value(real: np.ndarray, syn: np.ndarray) -> float:
    """
    Two-sided paired t-test p-value.

    Identical samples give 1 and a constant non-zero difference gives 0,
    where the t statistic itself is undefined.
    """
    differences = real - syn
    if np.all(differences == 0):
        return 1.0
    if np.all(differences == differences[0]):
        return 0.0
    return float(ttest_rel(real, syn).pvalue)


def _jsonable(values):
    return [None if np.isnan(v) else float(v) for v in values]


def k_discrepancy_test(
    real: Sequence[CellLayout],
    syn: Sequence[CellLayout],
    radii: Sequence[float] = config.KSTATS_RADII,
    alpha: float = config.KSTATS_ALPHA,
    border: bool = False,
) -> KReport:
    """
    Compare K estimates of paired real and synthetic layouts.

    For every ordered class pair and radius, the estimates of the real
    layouts are tested against those of their synthetic partners with a
    paired t-test; a case passes when ``p > alpha``. Layout pairs where
    either estimate is undefined are left out of that case.

    :raises PairingError: different set sizes or class specs
    :raises InsufficientDataError: fewer than two layout pairs
    :return: KReport
    """
    radii = check_radii(radii)
    if len(real) != len(syn):
        raise PairingError(
            f"Cannot pair {len(real)} real layouts with {len(syn)} synthetic."
        )
    if len(real) < 2:
        raise InsufficientDataError(
            f"A paired t-test needs >= 2 layout pairs, got {len(real)}."
        )
    class_names = real[0].class_names
    for layout in list(real) + list(syn):
        if layout.class_names != class_names:
            raise PairingError(
                f"Class specs differ: {class_names} vs {layout.class_names}."
            )

    khat, p_values = {}, {}
    for class_a, class_b in class_pairs(len(class_names)):
        key = KReport.pair_key(class_a, class_b)
        real_k = np.array(
            [ripley_k(l, class_a, class_b, radii, border) for l in real]
        )
        syn_k = np.array(
            [ripley_k(l, class_a, class_b, radii, border) for l in syn]
        )
        values = []
        for index in range(len(radii)):
            usable = ~(np.isnan(real_k[:, index]) | np.isnan(syn_k[:, index]))
            if usable.sum() < 2:
                log.debug(f"K test {key} r={radii[index]}: too few pairs")
                values.append(None)
                continue
            values.append(
                paired_p_value(real_k[usable, index], syn_k[usable, index])
            )
        p_values[key] = values
        khat[key] = {
            "real": [_jsonable(row) for row in real_k],
            "syn": [_jsonable(row) for row in syn_k],
        }

    report = KReport(
        radii.tolist(),
        class_names,
        khat,
        p_values,
        alpha,
        ESTIMATOR_BORDER if border else ESTIMATOR_NAIVE,
    )
    log.debug(
        f"K test: intra {report.intra_passes}, cross {report.cross_passes}"
    )
    return report
