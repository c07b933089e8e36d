import numpy as np
import pytest

from topocell.core.struct.lossobject import LossBreakdown, LossGradient, LossWeights
from topocell.errors import ParameterError


class TestLossWeights:
    def test_defaults(self):
        weights = LossWeights()

        assert (weights.lambda_count, weights.lambda_intra, weights.lambda_inter) == (
            1.0, 1.0, 1.0,
        )
        assert weights.delta == 9.0
        assert weights.dims == (1,)
        assert weights.tau_rule == "median"

    def test_parse(self):
        weights = LossWeights.parse("0.5,2,0", footprint=5)

        assert (weights.lambda_count, weights.lambda_intra, weights.lambda_inter) == (
            0.5, 2.0, 0.0,
        )
        assert weights.footprint == 5

    @pytest.mark.parametrize("text", ["1,2", "1,2,3,4", "a,b,c"])
    def test_parse_errors(self, text):
        with pytest.raises(ParameterError):
            LossWeights.parse(text)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"lambda_count": -1.0},
            {"lambda_inter": float("nan")},
            {"delta": 0.0},
            {"tau_rule": "mean"},
            {"tau_rule": "fixed"},
            {"dims": ()},
            {"dims": (2,)},
            {"p": 0.5},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ParameterError):
            LossWeights(**kwargs)

    def test_to_dict(self):
        data = LossWeights(dims=(0, 1)).to_dict()

        assert data["dims"] == [0, 1]
        assert data["tau"] is None
        assert data["subpixel"] is True


def test_breakdown_total_is_weighted():
    weights = LossWeights(2.0, 0.5, 3.0)

    breakdown = LossBreakdown(1.0, 4.0, [3.0, 5.0], 2.0, weights)

    assert breakdown.total == 2.0 + 2.0 + 6.0
    assert breakdown.topological == 6.0
    assert breakdown.spatial == 2.0 + 6.0
    data = breakdown.to_dict()
    assert data["matchings"] == {"intra": [], "inter": {}}
    assert data["intra_per_class"] == [3.0, 5.0]


class TestLossGradient:
    def test_stacked_and_norm(self):
        gradient = LossGradient([np.array([[3.0, 0.0]]), np.array([[0.0, 4.0]])])

        assert gradient.stacked().shape == (2, 2)
        assert gradient.norm == 5.0
        assert not gradient.is_zero()

    def test_empty(self):
        gradient = LossGradient([])

        assert gradient.stacked().shape == (0, 2)
        assert gradient.is_zero()
