# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from topocell import config
from topocell.core.struct.matchingobject import Matching
from topocell.errors import ParameterError

TAU_MEDIAN = "median"
TAU_FIXED = "fixed"


@dataclass(frozen=True)
class LossWeights:
    """
    Weights and knobs of the combined topological loss.

    ``subpixel`` lets footprints follow their centres between pixels, which
    keeps the loss continuous in the cell positions.
    """

    lambda_count: float = 1.0
    lambda_intra: float = 1.0
    lambda_inter: float = 1.0
    tau_rule: str = TAU_MEDIAN
    tau: Optional[float] = None
    per_channel: bool = False
    delta: float = float(config.DELTA)
    footprint: int = config.FOOTPRINT
    dims: Tuple[int, ...] = config.LOSS_DIMS
    p: float = 2.0
    symmetric: bool = False
    subpixel: bool = True

    def __post_init__(self):
        for name in ("lambda_count", "lambda_intra", "lambda_inter"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise ParameterError(f"{name} must be >= 0, got {value}.")
        if not self.delta > 0:
            raise ParameterError(f"delta must be > 0, got {self.delta}.")
        if self.tau_rule not in (TAU_MEDIAN, TAU_FIXED):
            raise ParameterError(
                f"tau_rule must be '{TAU_MEDIAN}' or '{TAU_FIXED}', "
                f"got {self.tau_rule!r}."
            )
        if self.tau_rule == TAU_FIXED and self.tau is None:
            raise ParameterError("A fixed tau_rule needs a tau value.")
        if not self.dims or not set(self.dims) <= {0, 1}:
            raise ParameterError(f"dims must be a subset of (0, 1), got {self.dims}.")
        if not self.p >= 1:
            raise ParameterError(f"p must be >= 1, got {self.p}.")

    @classmethod
    def parse(cls, text: str, **kwargs) -> "LossWeights":
        """
        Build weights from a ``count,intra,inter`` string.
        """
        try:
            values = [float(v) for v in text.split(",")]
        except ValueError as error:
            raise ParameterError(f"Cannot parse weights {text!r}.") from error
        if len(values) != 3:
            raise ParameterError(
                f"Weights need three values count,intra,inter, got {text!r}."
            )
        return cls(*values, **kwargs)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["dims"] = list(self.dims)
        return data


@dataclass
class LossBreakdown:
    """
    Values of the loss terms and of their weighted total.
    """

    count: float
    intra: float
    intra_per_class: List[float]
    inter: float
    weights: LossWeights
    matchings: Dict[str, object] = field(default_factory=dict)
    flags: List[str] = field(default_factory=list)

    @property
    def total(self) -> float:
        return (
            self.weights.lambda_count * self.count
            + self.weights.lambda_intra * self.intra
            + self.weights.lambda_inter * self.inter
        )

    @property
    def topological(self) -> float:
        return self.intra + self.inter

    @property
    def spatial(self) -> float:
        return (
            self.weights.lambda_intra * self.intra
            + self.weights.lambda_inter * self.inter
        )

    def to_dict(self) -> dict:
        def dump(matchings: Dict[int, Matching]):
            return {str(dim): m.to_dict() for dim, m in matchings.items()}

        return {
            "count": self.count,
            "intra": self.intra,
            "intra_per_class": list(self.intra_per_class),
            "inter": self.inter,
            "total": self.total,
            "weights": self.weights.to_dict(),
            "matchings": {
                "intra": [dump(m) for m in self.matchings.get("intra", [])],
                "inter": dump(self.matchings.get("inter", {})),
            },
            "flags": list(self.flags),
        }


@dataclass
class LossGradient:
    """
    Gradient of the weighted topological terms for every candidate cell.
    """

    per_class: List[np.ndarray]
    nondifferentiable: int = 0
    ties: int = 0

    def stacked(self) -> np.ndarray:
        if not self.per_class:
            return np.zeros((0, 2))
        return np.concatenate(self.per_class, axis=0)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.stacked()))

    def is_zero(self) -> bool:
        return not np.any(self.stacked())
