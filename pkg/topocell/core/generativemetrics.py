# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

"""
Set-level metrics comparing a synthetic layout collection to a reference:
Frechet distance of Gaussian summaries, TopoFD and the W1-kernel MMD.
"""

from typing import List, Optional, Sequence

import numpy as np

from topocell import config
from topocell.core.diagrammetrics import (
    barycenter,
    kernel_matrix,
    landscape,
    landscape_grid,
    pairwise_wasserstein,
)
from topocell.core.layout import count_metrics
from topocell.core.parallel import ordered_map
from topocell.core.persistence import rips_diagram
from topocell.core.struct.diagramobject import RIPS, FiltrationSpec
from topocell.core.struct.layoutobject import CellLayout
from topocell.core.struct.reportobject import GaussianSummary, MetricReport
from topocell.errors import (
    InsufficientDataError,
    NumericalError,
    PairingError,
    ParameterError,
)
from topocell.utils.logger import get_logger
from topocell.utils.tools import stable_mean

log = get_logger(__name__)

CENTER_BARYCENTER = "barycenter"
CENTER_SAMPLE = "sample"
SIGMA_FALLBACK = 1.0


def gaussian_summary(
    vectors,
    ridge: float = config.RIDGE,
    center: np.ndarray = None,
    scale_ridge: bool = True,
) -> GaussianSummary:
    """
    Mean and covariance of a set of feature vectors.

    The covariance is the unbiased sample covariance around the sample mean,
    or, when ``center`` is given, the average outer product of deviations
    from that centre (which then also serves as the mean). A ridge is added
    on the diagonal, multiplied by ``trace / d`` unless the trace is zero or
    ``scale_ridge`` is off. Rows are summed in a canonical order, so the
    result does not depend on the order of the vectors.

    :param vectors: (N, d) array or sequence of d-vectors
    :param ridge: diagonal regularisation
    :param center: optional fixed mean
    :raises ParameterError: vectors of different lengths
    :raises InsufficientDataError: no vector at all
    :return: GaussianSummary, flagged degenerate for a single vector
    """
    try:
        data = np.array(vectors, dtype=np.float64)
    except ValueError as error:
        raise ParameterError("Feature vectors differ in dimension.") from error
    if data.ndim == 1 and len(data) == 0:
        raise InsufficientDataError("A Gaussian summary needs >= 1 vector.")
    if data.ndim != 2:
        raise ParameterError("Feature vectors must form an (N, d) array.")
    if len(data) == 0:
        raise InsufficientDataError("A Gaussian summary needs >= 1 vector.")
    if not np.all(np.isfinite(data)):
        raise NumericalError("Feature vectors contain non-finite values.")

    data = data[np.lexsort(data.T[::-1])]
    count, dimension = data.shape

    if center is None:
        mean = data.mean(axis=0)
        denominator = count - 1
    else:
        mean = np.asarray(center, dtype=np.float64).reshape(-1)
        if mean.shape[0] != dimension:
            raise ParameterError(
                f"Centre has dimension {mean.shape[0]}, vectors {dimension}."
            )
        denominator = count

    degenerate = denominator == 0
    if degenerate:
        covariance = np.zeros((dimension, dimension))
    else:
        deviations = data - mean
        covariance = deviations.T @ deviations / denominator
        covariance = (covariance + covariance.T) / 2.0

    trace = float(np.trace(covariance))
    applied = ridge * trace / dimension if scale_ridge and trace > 0 else ridge
    covariance = covariance + applied * np.eye(dimension)
    return GaussianSummary(mean, covariance, count, applied, degenerate)


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    symmetric = (matrix + matrix.T) / 2.0
    values, vectors = np.linalg.eigh(symmetric)
    values = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * values) @ vectors.T


def frechet_distance(a: GaussianSummary, b: GaussianSummary) -> float:
    """
    ``|mu_a - mu_b|^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2))``.

    The trace of the square root is the nuclear norm of
    ``S_a^(1/2) S_b^(1/2)``, both roots taken from symmetric
    eigendecompositions with negative eigenvalues clamped to zero.

    :raises ParameterError: dimension mismatch
    :raises NumericalError: non-finite entries
    :return: the distance, clamped at zero
    """
    if a.dimension != b.dimension:
        raise ParameterError(
            f"Cannot compare summaries of dimension {a.dimension} "
            f"and {b.dimension}."
        )
    for summary in (a, b):
        if not (np.all(np.isfinite(summary.mean))
                and np.all(np.isfinite(summary.covariance))):
            raise NumericalError("Gaussian summary has non-finite entries.")

    difference = a.mean - b.mean
    mean_term = float(difference @ difference)
    root_a = _psd_sqrt(a.covariance)
    root_b = _psd_sqrt(b.covariance)
    cross = float(np.linalg.norm(root_a @ root_b, ord="nuc"))
    trace_term = float(np.trace(a.covariance) + np.trace(b.covariance))
    return max(0.0, mean_term + trace_term - 2.0 * cross)


def _layout_class_diagrams(task):
    points, diagonal, dims, max_scale = task
    spec = FiltrationSpec(RIPS, max(dims), max_scale)
    full = rips_diagram(points, spec, diagonal)
    return [full.in_dimension(dim) for dim in dims]


def _class_diagrams(layouts, class_id, dims, max_scale, threads):
    tasks = [
        (layout.points_of(class_id), layout.diagonal, dims, max_scale)
        for layout in layouts
    ]
    return ordered_map(_layout_class_diagrams, tasks, threads)


def _class_fd(ref_diagrams, syn_diagrams, dims, levels, samples, ridge,
              center):
    ref_vectors = [[] for _ in ref_diagrams]
    syn_vectors = [[] for _ in syn_diagrams]
    ref_means, syn_means = [], []

    for position, _ in enumerate(dims):
        ref_dim = [d[position] for d in ref_diagrams]
        syn_dim = [d[position] for d in syn_diagrams]
        ref_bary = barycenter(ref_dim).diagram
        syn_bary = barycenter(syn_dim).diagram
        grid = landscape_grid(ref_dim + syn_dim, samples)

        ref_means.append(landscape(ref_bary, levels, grid).vector)
        syn_means.append(landscape(syn_bary, levels, grid).vector)
        for vectors, diagrams in ((ref_vectors, ref_dim),
                                  (syn_vectors, syn_dim)):
            for row, diagram in zip(vectors, diagrams):
                row.append(landscape(diagram, levels, grid).vector)

    summaries = []
    for vectors, means in ((ref_vectors, ref_means), (syn_vectors, syn_means)):
        mean = np.concatenate(means)
        matrix = np.stack([np.concatenate(row) for row in vectors])
        if center == CENTER_BARYCENTER:
            summary = gaussian_summary(matrix, ridge, center=mean)
        else:
            summary = gaussian_summary(matrix, ridge)
            summary.mean = mean
        summaries.append(summary)
    return frechet_distance(*summaries)


def topofd(
    ref: Sequence[CellLayout],
    syn: Sequence[CellLayout],
    levels: int = config.LANDSCAPE_LEVELS,
    samples: int = config.LANDSCAPE_SAMPLES,
    ridge: float = config.RIDGE,
    include_h0: bool = False,
    center: str = CENTER_BARYCENTER,
    max_scale: float = None,
    threads: int = 1,
):
    """
    Topological Frechet distance between two layout collections.

    For every class: the Rips H1 diagrams of the class point cloud of every
    layout are summarised per set by the landscape of their barycenter (the
    mean) and the covariance of their individual landscapes, all sampled on
    one grid shared by both sets; the per-class value is the Frechet
    distance between the two summaries. TopoFD is the mean over classes.

    A class without any cell in a whole set is skipped and flagged; a layout
    missing a class contributes an empty diagram.

    :param ref: reference layouts
    :param syn: synthetic layouts with the same classes
    :param include_h0: append H0 landscapes to the H1 ones
    :param center: covariance centre, ``barycenter`` or ``sample``
    :raises PairingError: class specs differ or a set is empty
    :raises InsufficientDataError: no class is usable in both sets
    :return: (topofd, per-class list with None for skipped classes, flags)
    """
    _check_sets(ref, syn)
    if center not in (CENTER_BARYCENTER, CENTER_SAMPLE):
        raise ParameterError(
            f"Covariance centre must be '{CENTER_BARYCENTER}' or "
            f"'{CENTER_SAMPLE}', got {center!r}."
        )
    dims = (0, 1) if include_h0 else (1,)
    class_names = ref[0].class_names
    flags = []
    per_class: List[Optional[float]] = []

    for class_id, name in enumerate(class_names):
        ref_counts = [layout.counts[class_id] for layout in ref]
        syn_counts = [layout.counts[class_id] for layout in syn]
        empty_in = [
            label for label, counts in (("ref", ref_counts), ("syn", syn_counts))
            if not any(counts)
        ]
        if empty_in:
            flags.append(f"class {name} skipped: empty in {'+'.join(empty_in)}")
            log.debug(flags[-1])
            per_class.append(None)
            continue
        if not (all(ref_counts) and all(syn_counts)):
            flags.append(f"class {name} missing in some layouts")

        ref_diagrams = _class_diagrams(ref, class_id, dims, max_scale, threads)
        syn_diagrams = _class_diagrams(syn, class_id, dims, max_scale, threads)
        value = _class_fd(
            ref_diagrams, syn_diagrams, dims, levels, samples, ridge, center
        )
        log.debug(f"TopoFD of class {name}: {value}")
        per_class.append(value)

    usable = [value for value in per_class if value is not None]
    if not usable:
        raise InsufficientDataError("No class is populated in both sets.")
    value = stable_mean(usable)
    if not np.isfinite(value):
        raise NumericalError("TopoFD is not finite.")
    return value, per_class, flags


def mmd(ref_diagrams, syn_diagrams, sigma: float = None):
    """
    Biased MMD estimate with the W1 Gaussian kernel.

    ``mean k(r, r') + mean k(s, s') - 2 mean k(r, s)``, clamped at zero
    before the square root. Without an explicit ``sigma`` the median of the
    pooled pairwise W1 distances is used, falling back to 1 when that
    median is zero.

    :raises ParameterError: explicit sigma <= 0
    :raises InsufficientDataError: an empty set
    :return: (mmd, sigma used)
    """
    if len(ref_diagrams) == 0 or len(syn_diagrams) == 0:
        raise InsufficientDataError("MMD needs non-empty diagram sets.")
    if sigma is not None and not sigma > 0:
        raise ParameterError(f"MMD sigma must be positive, got {sigma}.")

    pooled = list(ref_diagrams) + list(syn_diagrams)
    distances = pairwise_wasserstein(pooled, p=1.0)
    if sigma is None:
        upper = distances[np.triu_indices(len(pooled), k=1)]
        sigma = float(np.median(upper)) if len(upper) else 0.0
        if sigma == 0.0:
            sigma = SIGMA_FALLBACK
        log.debug(f"MMD sigma from the median heuristic: {sigma}")

    gram = kernel_matrix(distances, sigma)
    n = len(ref_diagrams)
    squared = (
        gram[:n, :n].mean() + gram[n:, n:].mean() - 2.0 * gram[:n, n:].mean()
    )
    return float(np.sqrt(max(0.0, squared))), sigma


def _layout_h1(task):
    points, diagonal, max_scale = task
    return rips_diagram(
        points, FiltrationSpec(RIPS, 1, max_scale), diagonal
    ).in_dimension(1)


def layout_mmd(
    ref: Sequence[CellLayout],
    syn: Sequence[CellLayout],
    sigma: float = None,
    max_scale: float = None,
    threads: int = 1,
):
    """
    MMD over per-layout H1 diagrams of the pooled (all-class) point cloud,
    plus the same statistic per class.

    :return: (mmd, per-class list with None for classes empty in a set,
        sigma used for the pooled value)
    """
    _check_sets(ref, syn)

    def diagrams_of(layouts, class_id=None):
        tasks = [
            (layout.stacked()[0] if class_id is None
             else layout.points_of(class_id), layout.diagonal, max_scale)
            for layout in layouts
        ]
        return ordered_map(_layout_h1, tasks, threads)

    value, used_sigma = mmd(diagrams_of(ref), diagrams_of(syn), sigma)
    per_class = []
    for class_id in range(ref[0].n_classes):
        if not any(l.counts[class_id] for l in ref) or not any(
            l.counts[class_id] for l in syn
        ):
            per_class.append(None)
            continue
        per_class.append(
            mmd(diagrams_of(ref, class_id), diagrams_of(syn, class_id),
                sigma)[0]
        )
    return value, per_class, used_sigma


def feature_fd(ref_vectors, syn_vectors, ridge: float = config.RIDGE):
    """
    Frechet distance between two sets of externally computed features.
    """
    return frechet_distance(
        gaussian_summary(ref_vectors, ridge), gaussian_summary(syn_vectors, ridge)
    )


def _check_sets(ref, syn):
    if len(ref) == 0 or len(syn) == 0:
        raise PairingError("Both layout sets must be non-empty.")
    names = ref[0].class_names
    for layout in list(ref) + list(syn):
        if layout.class_names != names:
            raise PairingError(
                f"Class specs differ: {names} vs {layout.class_names}."
            )


def evaluate(
    ref: Sequence[CellLayout],
    syn: Sequence[CellLayout],
    metrics: Sequence[str] = ("topofd", "mmd", "cce", "tce"),
    levels: int = config.LANDSCAPE_LEVELS,
    samples: int = config.LANDSCAPE_SAMPLES,
    ridge: float = config.RIDGE,
    sigma: float = None,
    include_h0: bool = False,
    center: str = CENTER_BARYCENTER,
    count_mode: str = "points",
    max_scale: float = None,
    ref_features=None,
    syn_features=None,
    threads: int = 1,
) -> MetricReport:
    """
    Compute the requested metrics into a MetricReport.

    :param metrics: any of topofd, mmd, cce, tce, fd
    :raises ParameterError: unknown metric, or fd without feature vectors
    :raises PairingError: cce/tce on sets that cannot be paired
    :raises NumericalError: a metric is not finite
    """
    unknown = set(metrics) - set(MetricReport.METRICS)
    if unknown:
        raise ParameterError(
            f"Unknown metrics {sorted(unknown)}; choose from "
            f"{', '.join(MetricReport.METRICS)}."
        )
    _check_sets(ref, syn)

    report = MetricReport(ref[0].class_names)
    parameters = {}

    if "topofd" in metrics:
        report.topofd, report.per_class_fd, flags = topofd(
            ref, syn, levels, samples, ridge, include_h0, center, max_scale,
            threads,
        )
        report.flags.extend(flags)
        parameters.update(
            levels=levels, samples=samples, ridge=ridge,
            include_h0=include_h0, center=center,
        )

    if "mmd" in metrics:
        report.mmd, report.per_class_mmd, used_sigma = layout_mmd(
            ref, syn, sigma, max_scale, threads
        )
        parameters.update(
            sigma=used_sigma, sigma_rule="fixed" if sigma else "median"
        )

    if "cce" in metrics or "tce" in metrics:
        counts = count_metrics(ref, syn, count_mode)
        if "cce" in metrics:
            report.cce = [float(v) for v in counts.per_class_cce]
        if "tce" in metrics:
            report.tce = counts.tce
        parameters["count_mode"] = count_mode

    if "fd" in metrics:
        if ref_features is None or syn_features is None:
            raise ParameterError("The fd metric needs feature vectors.")
        report.fd = feature_fd(ref_features, syn_features, ridge)
        parameters.setdefault("ridge", ridge)

    if "topofd" in metrics or "mmd" in metrics:
        parameters["max_scale"] = "diagonal" if max_scale is None else max_scale
    report.parameters = parameters

    if not all(np.isfinite(v) for v in report.values()):
        raise NumericalError("A metric evaluated to a non-finite value.")
    return report
