# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from topocell import __version__, config


@dataclass
class CountReport:
    """
    Cell count errors between paired real and synthetic layouts.
    """

    per_class_cce: np.ndarray
    tce: float
    per_sample_counts: List[Tuple[np.ndarray, np.ndarray]]
    mode: str = "points"

    def to_dict(self) -> dict:
        return {
            "cce": [float(v) for v in self.per_class_cce],
            "tce": float(self.tce),
            "count_mode": self.mode,
            "per_sample_counts": [
                {"real": real.tolist(), "syn": syn.tolist()}
                for real, syn in self.per_sample_counts
            ],
        }


@dataclass
class GaussianSummary:
    """
    Mean and covariance of a set of feature vectors.
    """

    mean: np.ndarray
    covariance: np.ndarray
    sample_count: int
    ridge: float = 0.0
    degenerate: bool = False

    @property
    def dimension(self) -> int:
        return self.mean.shape[0]


@dataclass
class RunManifest:
    """
    Everything needed to reproduce one command invocation.
    """

    command: str
    parameters: Dict[str, object]
    seeds: List[int] = field(default_factory=list)
    input_digests: Dict[str, str] = field(default_factory=dict)
    version: str = __version__
    wall_clock: Optional[float] = None

    def to_dict(self) -> dict:
        data = {
            "command": self.command,
            "parameters": self.parameters,
            "seeds": list(self.seeds),
            "input_digests": dict(sorted(self.input_digests.items())),
            "version": self.version,
        }
        if self.wall_clock is not None:
            data["wall_clock"] = self.wall_clock
        return data


@dataclass
class MetricReport:
    """
    Set-level comparison of a synthetic collection against a reference.

    Metrics that were not requested stay ``None`` and are left out of the
    serialized report.
    """

    class_names: List[str]
    topofd: Optional[float] = None
    per_class_fd: Optional[List[Optional[float]]] = None
    mmd: Optional[float] = None
    per_class_mmd: Optional[List[Optional[float]]] = None
    cce: Optional[List[float]] = None
    tce: Optional[float] = None
    fd: Optional[float] = None
    parameters: Dict[str, object] = field(default_factory=dict)
    flags: List[str] = field(default_factory=list)
    manifest: Optional[RunManifest] = None

    METRICS = ("topofd", "mmd", "cce", "tce", "fd")

    def values(self) -> List[float]:
        collected = []
        for name in ("topofd", "mmd", "tce", "fd"):
            value = getattr(self, name)
            if value is not None:
                collected.append(value)
        for name in ("per_class_fd", "per_class_mmd", "cce"):
            collected.extend(
                v for v in (getattr(self, name) or []) if v is not None
            )
        return collected

    def to_dict(self) -> dict:
        data = {"schema": config.SCHEMA_VERSION, "classes": self.class_names}
        if self.topofd is not None:
            data["topofd"] = self.topofd
            data["per_class_fd"] = self.per_class_fd
        if self.mmd is not None:
            data["mmd"] = self.mmd
            data["per_class_mmd"] = self.per_class_mmd
        if self.cce is not None:
            data["cce"] = self.cce
        if self.tce is not None:
            data["tce"] = self.tce
        if self.fd is not None:
            data["fd"] = self.fd
        data["parameters"] = self.parameters
        data["flags"] = list(self.flags)
        if self.manifest is not None:
            data["manifest"] = self.manifest.to_dict()
        return data

    def csv_row(self) -> Tuple[List[str], List[object]]:
        """
        Flatten the report into one CSV row.

        :return: (header, row)
        """
        header, row = [], []
        for name in ("topofd", "mmd", "tce", "fd"):
            value = getattr(self, name)
            if value is not None:
                header.append(name)
                row.append(value)
        for prefix, values in (
            ("fd", self.per_class_fd),
            ("cce", self.cce),
        ):
            if values is None:
                continue
            for class_name, value in zip(self.class_names, values):
                header.append(f"{prefix}_{class_name}")
                row.append("" if value is None else value)
        return header, row


@dataclass
class KReport:
    """
    Paired t-tests on Ripley K estimates of real and synthetic layouts.
    """

    radii: List[float]
    class_names: List[str]
    khat: Dict[str, Dict[str, List[List[float]]]]
    p_values: Dict[str, List[float]]
    alpha: float
    estimator: str

    @staticmethod
    def pair_key(class_a: int, class_b: int) -> str:
        return f"{class_a}-{class_b}"

    def passes(self, key: str) -> int:
        return sum(
            1 for p in self.p_values[key] if p is not None and p > self.alpha
        )

    def _totals(self, intra: bool) -> Tuple[int, int]:
        passed = total = 0
        for key, values in self.p_values.items():
            class_a, class_b = key.split("-")
            if (class_a == class_b) != intra:
                continue
            passed += self.passes(key)
            total += len(values)
        return passed, total

    @property
    def intra_passes(self) -> Tuple[int, int]:
        return self._totals(intra=True)

    @property
    def cross_passes(self) -> Tuple[int, int]:
        return self._totals(intra=False)

    def to_dict(self) -> dict:
        intra_passed, intra_total = self.intra_passes
        cross_passed, cross_total = self.cross_passes
        return {
            "schema": config.SCHEMA_VERSION,
            "classes": self.class_names,
            "radii": self.radii,
            "alpha": self.alpha,
            "estimator": self.estimator,
            "p_values": self.p_values,
            "passes": {key: self.passes(key) for key in self.p_values},
            "intra": {"passed": intra_passed, "total": intra_total},
            "cross": {"passed": cross_passed, "total": cross_total},
            "khat": self.khat,
        }
