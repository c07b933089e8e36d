# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

import csv
import json
from pathlib import Path
from typing import List, Sequence

from topocell.core.struct.lossobject import LossBreakdown
from topocell.core.struct.matchingobject import LandscapeVector
from topocell.core.struct.reportobject import KReport, MetricReport, RunManifest
from topocell.utils.colors import green, red
from topocell.utils.pprint import table
from topocell.utils.tools import clean

MANIFEST_SUFFIX = ".manifest.json"


def write_json(data: dict, path) -> None:
    """
    Write a report as indented JSON; NaN and infinities become null.
    """
    with open(path, "w") as report_file:
        json.dump(clean(data), report_file, indent=4, allow_nan=False)
        report_file.write("\n")


def manifest_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + MANIFEST_SUFFIX)


def write_manifest(manifest: RunManifest, output_path) -> Path:
    """
    Write the manifest next to a CSV output as ``<output>.manifest.json``.
    """
    target = manifest_path(output_path)
    write_json(manifest.to_dict(), target)
    return target


def write_rows(header: Sequence[str], rows, path) -> None:
    with open(path, "w", newline="") as csv_file:
        writer = csv.writer(csv_file, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [repr(float(v)) if isinstance(v, float) else v for v in row]
            )


def write_landscape(vector: LandscapeVector, path) -> None:
    """
    One row per grid sample: ``t, lambda_1, ..., lambda_K``.
    """
    header = ["t"] + [f"lambda_{k + 1}" for k in range(vector.levels)]
    rows = [
        [float(t)] + [float(v) for v in vector.values[:, index]]
        for index, t in enumerate(vector.grid)
    ]
    write_rows(header, rows, path)


def write_metric_csv(report: MetricReport, path) -> None:
    header, row = report.csv_row()
    write_rows(header, [row], path)


def metric_table(report: MetricReport):
    rows = []
    for name in ("topofd", "mmd", "tce", "fd"):
        value = getattr(report, name)
        if value is not None:
            rows.append([name, "all", value])
    for name, values in (
        ("fd", report.per_class_fd),
        ("mmd", report.per_class_mmd),
        ("cce", report.cce),
    ):
        for class_name, value in zip(report.class_names, values or []):
            rows.append([name, class_name, "skipped" if value is None else value])
    return table(["Metric", "Class", "Value"], rows)


def loss_table(breakdown: LossBreakdown):
    weights = breakdown.weights
    rows = [
        ["count", weights.lambda_count, breakdown.count],
        ["intra", weights.lambda_intra, breakdown.intra],
        ["inter", weights.lambda_inter, breakdown.inter],
        ["total", "", breakdown.total],
    ]
    return table(["Term", "Weight", "Value"], rows)


def k_table(report: KReport):
    header = ["Pair"] + [f"r={r:g}" for r in report.radii] + ["Passed"]
    rows: List[list] = []
    for key, values in report.p_values.items():
        cells = []
        for p in values:
            if p is None:
                cells.append("n/a")
            elif p > report.alpha:
                cells.append(green(f"{p:.3f}"))
            else:
                cells.append(red(f"{p:.3f}"))
        rows.append([key] + cells + [f"{report.passes(key)}/{len(values)}"])
    return table(header, rows)
