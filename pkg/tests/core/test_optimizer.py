from unittest.mock import patch

import numpy as np
import pytest

from topocell.core.generator import generate
from topocell.core.optimizer import TRACE_HEADER, optimize_layout
from topocell.core.struct.layoutobject import CellLayout
from topocell.core.struct.lossobject import LossBreakdown, LossGradient, LossWeights
from topocell.core.struct.processobject import OptimizerConfig, PointProcessSpec
from topocell.errors import PairingError

SPATIAL = LossWeights(0.0, 1.0, 1.0)


def jittered(layout, rng, sigma):
    moved = []
    for points in layout.points:
        points = points + rng.normal(0.0, sigma, points.shape)
        points[:, 0] = np.clip(points[:, 0], 0.0, layout.width - 1e-6)
        points[:, 1] = np.clip(points[:, 1], 0.0, layout.height - 1e-6)
        moved.append(points)
    return layout.with_points(moved)


@pytest.fixture()
def target():
    return generate(
        PointProcessSpec(width=64, height=64, class_names=("a", "b"),
                         counts=(10, 10), seed=21)
    )


def test_trace_layout(rng, target):
    init = jittered(target, rng, 3.0)

    result = optimize_layout(init, target, OptimizerConfig(steps=4, lr=1e-4))

    assert len(TRACE_HEADER) == 5
    assert [row[0] for row in result.trace] == [0, 1, 2, 3, 4]
    assert all(np.isfinite(row).all() for row in np.array(result.trace))
    assert result.steps_run == 4
    assert not result.diverged
    assert result.layout.counts.tolist() == init.counts.tolist()


def test_descent_lowers_the_loss(rng, target):
    init = jittered(target, rng, 3.0)

    result = optimize_layout(
        init, target, OptimizerConfig(steps=3, lr=1e-4, weights=SPATIAL)
    )

    assert result.initial > 0
    assert min(row[2] + row[3] for row in result.trace[1:]) < result.initial


def test_trace_every(rng, target):
    init = jittered(target, rng, 3.0)

    result = optimize_layout(
        init, target, OptimizerConfig(steps=5, lr=1e-4, trace_every=2)
    )

    assert [row[0] for row in result.trace] == [0, 2, 4, 5]


def test_target_is_a_fixed_point(target):
    result = optimize_layout(target, target, OptimizerConfig(steps=3))

    assert result.final == 0.0
    assert all(row[4] == 0.0 for row in result.trace)
    assert np.array_equal(result.layout.points_of(0), target.points_of(0))


def test_divergence_stops_early(rng, target):
    init = jittered(target, rng, 3.0)
    cfg = OptimizerConfig(
        steps=20, lr=1e-4, weights=SPATIAL, divergence_factor=1e-6, patience=2
    )

    result = optimize_layout(init, target, cfg)

    assert result.diverged
    assert result.steps_run == 2


def test_growing_count_term_is_not_divergence(rng, target):
    weights = LossWeights(1.0, 1.0, 1.0)
    init = jittered(target, rng, 3.0)
    rising_count = iter([0.0] + [100.0] * 5)

    def fake_evaluate(layout, targets, weights):
        count = next(rising_count)
        intra = inter = 1.0 if count == 0.0 else 0.5
        gradient = LossGradient([np.ones_like(p) for p in layout.points])
        return LossBreakdown(count, intra, [intra, intra], inter, weights), gradient

    cfg = OptimizerConfig(steps=5, lr=1e-4, weights=weights, patience=2)
    with patch("topocell.core.optimizer.evaluate", side_effect=fake_evaluate):
        result = optimize_layout(init, target, cfg)

    assert not result.diverged
    assert result.steps_run == 5
    assert result.trace[-1][4] > cfg.divergence_factor * result.trace[0][4]


def test_points_stay_on_the_canvas(rng, target):
    init = jittered(target, rng, 3.0)

    result = optimize_layout(init, target, OptimizerConfig(steps=3, lr=50.0))

    coordinates, _ = result.layout.stacked()
    assert coordinates.min() >= 0
    assert coordinates.max() < 64


def test_frame_mismatch(target):
    other = CellLayout(64, 64, ["a"], [[]])

    with pytest.raises(PairingError):
        optimize_layout(target, other)


@pytest.mark.slow
def test_jittered_layouts_recover():
    ratios = []
    for seed in range(20):
        target = generate(
            PointProcessSpec(width=128, height=128, class_names=("a", "b", "c"),
                             counts=(20, 20, 20), seed=seed)
        )
        init = jittered(target, np.random.default_rng(seed), 10.0)

        result = optimize_layout(init, target, OptimizerConfig(steps=200, lr=0.05))

        ratios.append(result.final / result.initial)

    assert np.median(ratios) <= 0.5
