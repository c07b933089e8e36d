import pytest

from topocell.core.struct.lossobject import LossWeights
from topocell.core.struct.processobject import (
    MATERN,
    OptimizerConfig,
    PointProcessSpec,
    RingSpec,
)
from topocell.errors import ParameterError


@pytest.mark.parametrize("radius, m", [(0.0, 6), (-1.0, 6), (5.0, 2)])
def test_invalid_ring(radius, m):
    with pytest.raises(ParameterError):
        RingSpec(0, 10.0, 10.0, radius, m)


class TestPointProcessSpec:
    def test_defaults(self):
        spec = PointProcessSpec(counts=(5,))

        assert (spec.width, spec.height) == (256, 256)
        assert spec.seed == 0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kind": "hardcore", "counts": (1,)},
            {"width": 0, "counts": (1,)},
            {"counts": (1, 2)},
            {"counts": (-1,)},
            {},
            {"counts": (1,), "jitter": -0.5},
            {"counts": (1,), "min_separation": -1.0},
            {"kind": MATERN, "cluster_radius": 0.0},
            {"counts": (1,), "rings": (RingSpec(1, 5, 5, 2, 3),)},
            {"counts": (1,), "seed": 2 ** 64},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ParameterError):
            PointProcessSpec(**kwargs)

    def test_matern_without_counts(self):
        spec = PointProcessSpec(kind=MATERN)

        assert spec.counts is None


class TestOptimizerConfig:
    def test_defaults(self):
        cfg = OptimizerConfig()

        assert (cfg.steps, cfg.lr) == (200, 0.05)
        assert cfg.weights == LossWeights()

    @pytest.mark.parametrize(
        "kwargs", [{"steps": 0}, {"lr": 0.0}, {"lr": -1.0}, {"trace_every": 0}]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ParameterError):
            OptimizerConfig(**kwargs)
