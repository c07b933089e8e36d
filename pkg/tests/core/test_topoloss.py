import numpy as np
import pytest

from topocell.core.struct.diagramobject import PersistenceDiagram
from topocell.core.struct.layoutobject import CellLayout, RasterLayout
from topocell.core.struct.lossobject import LossWeights
from topocell.core.topoloss import (
    TargetDiagrams,
    binarize,
    class_state,
    count_loss,
    evaluate,
    inter_loss,
    intra_loss,
    loss_gradient,
    spc_loss,
    total_loss,
)
from topocell.errors import PairingError

SPATIAL = LossWeights(0.0, 1.0, 1.0)


@pytest.fixture()
def random_pair(rng):
    def layout():
        return CellLayout(
            48, 48, ["a", "b"],
            [rng.uniform(6, 42, (10, 2)), rng.uniform(6, 42, (10, 2))],
        )

    return layout(), layout()


class TestBinarize:
    def test_constant_grid_is_all_foreground(self):
        assert binarize(np.full((4, 5), 0.3)).all()

    def test_median_rule(self):
        values = np.arange(9.0).reshape(3, 3)

        result = binarize(values)

        assert result.dtype == np.uint8
        assert result.sum() == 5
        assert np.array_equal(result, (values >= 4).astype(np.uint8))

    def test_per_channel_median(self):
        values = np.stack([np.arange(9.0), np.arange(10.0, 19.0)]).reshape(2, 3, 3)

        pooled = binarize(values)
        separate = binarize(values, per_channel=True)

        assert pooled[0].sum() == 0
        assert pooled[1].sum() == 9
        assert separate.reshape(2, -1).sum(axis=1).tolist() == [5, 5]

    def test_fixed_tau(self):
        values = np.array([[0.1, 0.5], [0.7, 0.2]])

        result = binarize(values, "fixed", 0.5)

        assert result.tolist() == [[0, 1], [1, 0]]


class TestCountLoss:
    def test_point_layouts(self):
        candidate = CellLayout(40, 40, ["a", "b"], [[(10, 10)], [(30, 30)]])
        target = CellLayout(
            40, 40, ["a", "b"], [[(10, 10), (30, 10)], [(30, 30)]]
        )

        assert count_loss(candidate, target) == 0.5

    def test_real_valued_grids(self):
        candidate = np.zeros((2, 6, 6))
        candidate[0, :3, :3] = 1.0
        target = np.zeros((2, 6, 6))
        weights = LossWeights(tau_rule="fixed", tau=0.5)

        assert count_loss(candidate, target, weights) == 0.5

    def test_delta_scales_the_counts(self):
        candidate = RasterLayout(np.ones((1, 3, 6), dtype=np.uint8), ["a"])
        target = RasterLayout(np.zeros((1, 3, 6), dtype=np.uint8), ["a"])

        assert count_loss(candidate, target, LossWeights(delta=18.0)) == 1.0

    def test_channel_mismatch(self):
        candidate = RasterLayout(np.zeros((2, 4, 4), dtype=np.uint8), ["a", "b"])
        target = RasterLayout(np.zeros((1, 4, 4), dtype=np.uint8), ["a"])

        with pytest.raises(PairingError):
            count_loss(candidate, target)


def test_class_state_without_points():
    assert class_state(np.zeros((0, 2)), (10, 10), LossWeights()) is None


def test_class_state_of_a_ring(ring_layout):
    state = class_state(ring_layout().points_of(0), (48, 96), LossWeights())

    assert len(state.diagram) >= 1
    assert set(state.diagram.dims.tolist()) == {1}
    assert state.diagram.persistence.max() > 5


class TestSpcLoss:
    def test_point_and_diagonal_partners(self):
        candidate = PersistenceDiagram.from_pairs([[1.0, 5.0], [2.0, 2.5]])
        target = PersistenceDiagram.from_pairs([[1.0, 4.0]])

        result = spc_loss(candidate, target)

        assert result.value == pytest.approx(1.0 + 0.125)
        assert np.allclose(result.goals, [[1.0, 4.0], [2.25, 2.25]])

    def test_symmetric_adds_unmatched_target_points(self):
        candidate = PersistenceDiagram()
        target = PersistenceDiagram.from_pairs([[1.0, 4.0]])

        assert spc_loss(candidate, target).value == 0.0
        assert spc_loss(candidate, target, symmetric=True).value == pytest.approx(4.5)


class TestEvaluate:
    def test_identical_layouts_cost_nothing(self, random_pair):
        layout, _ = random_pair

        breakdown, gradient = evaluate(layout, layout)

        assert breakdown.count == 0.0
        assert breakdown.intra == 0.0
        assert breakdown.inter == 0.0
        assert breakdown.total == 0.0
        assert gradient.is_zero()

    def test_different_rings(self, ring_layout):
        candidate, target = ring_layout(radius=12.0), ring_layout(radius=16.0)

        breakdown = total_loss(candidate, target)

        assert breakdown.count == 0.0
        assert breakdown.intra > 0
        assert breakdown.inter > 0
        assert breakdown.intra == pytest.approx(np.mean(breakdown.intra_per_class))
        assert breakdown.total == pytest.approx(breakdown.intra + breakdown.inter)

    def test_exact_transform_ignores_sub_pixel_shifts(self):
        target = CellLayout(
            40, 40, ["a", "b"],
            [[(10, 10), (20, 12), (14, 24), (28, 28)], [(6, 30), (32, 8)]],
        )
        candidate = target.with_points([p + 0.2 for p in target.points])

        exact = total_loss(candidate, target, LossWeights(subpixel=False))

        assert exact.intra == 0.0
        assert exact.inter == 0.0

    def test_term_helpers_agree(self, random_pair):
        candidate, target = random_pair
        breakdown = total_loss(candidate, target)

        intra, per_class = intra_loss(candidate, target)

        assert intra == breakdown.intra
        assert per_class == breakdown.intra_per_class
        assert inter_loss(candidate, target) == breakdown.inter

    def test_precomputed_targets(self, random_pair):
        candidate, target = random_pair

        direct = total_loss(candidate, target)
        cached = total_loss(candidate, TargetDiagrams(target, LossWeights()))

        assert cached.total == direct.total

    def test_empty_candidate_class(self, ring_layout):
        target = ring_layout()
        candidate = target.with_points([target.points_of(0), np.zeros((0, 2))])
        missing = TargetDiagrams(target, LossWeights()).per_class[1]

        plain = total_loss(candidate, target)
        symmetric = total_loss(candidate, target, LossWeights(symmetric=True))

        assert plain.intra_per_class == [0.0, 0.0]
        assert symmetric.intra_per_class[0] == 0.0
        assert symmetric.intra_per_class[1] == pytest.approx(
            float(np.sum(missing.persistence ** 2) / 2.0)
        )
        assert plain.count > 0

    def test_breakdown_serializes(self, ring_layout):
        breakdown = total_loss(ring_layout(radius=12.0), ring_layout(radius=14.0))

        data = breakdown.to_dict()

        assert data["total"] == breakdown.total
        assert len(data["matchings"]["intra"]) == 2
        assert "1" in data["matchings"]["inter"]
        assert data["weights"]["dims"] == [1]

    def test_frame_mismatch(self, ring_layout):
        other = CellLayout(96, 49, ["c0", "c1"], [[], []])

        with pytest.raises(PairingError):
            evaluate(ring_layout(), other)


class TestGradient:
    def test_matches_finite_differences(self, rng, random_pair):
        candidate, target = random_pair
        gradient = loss_gradient(candidate, target, SPATIAL).per_class
        targets = TargetDiagrams(target, SPATIAL)
        step = 1e-3

        def loss_at(class_id, index, axis, delta):
            points = [p.copy() for p in candidate.points]
            points[class_id][index, axis] += delta
            return total_loss(candidate.with_points(points), targets, SPATIAL).total

        assert total_loss(candidate, targets, SPATIAL).total > 0
        failures = 0
        coordinates = [(c, i, a) for c in range(2) for i in range(10) for a in range(2)]
        for choice in rng.permutation(len(coordinates))[:10]:
            class_id, index, axis = coordinates[choice]
            estimate = (
                loss_at(class_id, index, axis, step)
                - loss_at(class_id, index, axis, -step)
            ) / (2 * step)
            analytic = gradient[class_id][index, axis]
            if abs(analytic - estimate) > 1e-2 * max(abs(analytic), abs(estimate)) + 1e-6:
                failures += 1

        assert failures <= 1

    def test_small_step_decreases_the_loss(self, random_pair):
        candidate, target = random_pair
        targets = TargetDiagrams(target, SPATIAL)
        breakdown, gradient = evaluate(candidate, targets, SPATIAL)
        assert not gradient.is_zero()

        lr = 1e-4 / np.abs(gradient.stacked()).max()
        moved = candidate.with_points(
            [p - lr * g for p, g in zip(candidate.points, gradient.per_class)]
        )

        assert total_loss(moved, targets, SPATIAL).total < breakdown.total

    def test_count_term_has_no_gradient(self, random_pair):
        candidate, target = random_pair

        gradient = loss_gradient(candidate, target, LossWeights(1.0, 0.0, 0.0))

        assert gradient.is_zero()
        assert [g.shape for g in gradient.per_class] == [(10, 2), (10, 2)]


@pytest.mark.slow
def test_gradient_fidelity_on_many_coordinates():
    rng = np.random.default_rng(7)
    failures = checked = tied = 0
    for _ in range(25):
        candidate, target = (
            CellLayout(64, 64, ["a", "b"],
                       [rng.uniform(6, 58, (12, 2)), rng.uniform(6, 58, (12, 2))])
            for _ in range(2)
        )
        targets = TargetDiagrams(target, SPATIAL)
        _, gradient = evaluate(candidate, targets, SPATIAL)
        for _ in range(20):
            class_id, index, axis = rng.integers(2), rng.integers(12), rng.integers(2)
            values, ties = [], gradient.ties
            for delta in (1e-3, -1e-3):
                points = [p.copy() for p in candidate.points]
                points[class_id][index, axis] += delta
                breakdown, moved = evaluate(
                    candidate.with_points(points), targets, SPATIAL
                )
                values.append(breakdown.total)
                ties += moved.ties
            if ties:
                tied += 1
                continue
            estimate = (values[0] - values[1]) / 2e-3
            analytic = gradient.per_class[class_id][index, axis]
            checked += 1
            if abs(analytic - estimate) > 1e-2 * max(abs(analytic), abs(estimate)) + 1e-6:
                failures += 1

    assert checked + tied == 500
    assert checked >= 250
    assert failures <= 0.1 * checked
