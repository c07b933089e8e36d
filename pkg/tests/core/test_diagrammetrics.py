import math
from itertools import combinations, permutations

import numpy as np
import pytest

from topocell.core.diagrammetrics import (
    barycenter,
    bottleneck,
    kernel_matrix,
    landscape,
    landscape_grid,
    pairwise_wasserstein,
    stack_landscapes,
    w1_gaussian_kernel,
    wasserstein,
)
from topocell.core.persistence import cubical_sublevel_diagram
from topocell.core.struct.diagramobject import PersistenceDiagram
from topocell.core.struct.matchingobject import DIAGONAL
from topocell.errors import DiagramError, ParameterError


def matchings(m, n):
    """Every partial injective pairing of m points with n points."""
    for k in range(min(m, n) + 1):
        for rows in combinations(range(m), k):
            for cols in permutations(range(n), k):
                yield list(zip(rows, cols))


def matching_costs(a, b, ground, to_diagonal):
    source, target = a.finite_array(), b.finite_array()
    for pairs in matchings(len(source), len(target)):
        used_rows = {i for i, _ in pairs}
        used_cols = {j for _, j in pairs}
        yield (
            [ground(source[i], target[j]) for i, j in pairs]
            + [to_diagonal(s) for i, s in enumerate(source) if i not in used_rows]
            + [to_diagonal(t) for j, t in enumerate(target) if j not in used_cols]
        )


def exhaustive_wasserstein(a, b, p):
    best = min(
        sum(c ** p for c in costs)
        for costs in matching_costs(
            a, b,
            lambda s, t: math.hypot(*(s - t)),
            lambda s: (s[1] - s[0]) / math.sqrt(2.0),
        )
    )
    return best ** (1.0 / p)


def exhaustive_bottleneck(a, b):
    return min(
        max(costs, default=0.0)
        for costs in matching_costs(
            a, b,
            lambda s, t: float(np.max(np.abs(s - t))),
            lambda s: (s[1] - s[0]) / 2.0,
        )
    )


def random_diagram(rng, count):
    births = rng.uniform(0, 5, count)
    return PersistenceDiagram.from_pairs(
        np.column_stack([births, births + rng.uniform(0.1, 4, count)])
    )


class TestWasserstein:
    @pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
    def test_matches_exhaustive_search(self, rng, p):
        for m, n in ((2, 2), (3, 1), (0, 3), (2, 3)):
            a, b = random_diagram(rng, m), random_diagram(rng, n)

            distance, _ = wasserstein(a, b, p)

            assert distance == pytest.approx(exhaustive_wasserstein(a, b, p))

    @pytest.mark.parametrize("seed", range(200))
    def test_matches_exhaustive_search_on_random_pairs(self, seed):
        rng = np.random.default_rng(seed)
        a = random_diagram(rng, rng.integers(0, 6))
        b = random_diagram(rng, rng.integers(0, 6))
        p = (1.0, 2.0, 3.0)[seed % 3]

        distance, _ = wasserstein(a, b, p)

        assert distance == pytest.approx(
            exhaustive_wasserstein(a, b, p), rel=0, abs=1e-9
        )
        assert wasserstein(a, a, p)[0] == pytest.approx(0.0, abs=1e-9)
        assert wasserstein(b, a, p)[0] == pytest.approx(distance, rel=0, abs=1e-9)

    @pytest.mark.parametrize("seed", range(200))
    def test_triangle_inequality(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (random_diagram(rng, rng.integers(0, 7)) for _ in range(3))

        assert wasserstein(a, c)[0] <= (
            wasserstein(a, b)[0] + wasserstein(b, c)[0] + 1e-9
        )

    def test_single_point_against_empty(self):
        a = PersistenceDiagram.from_pairs([(0.0, 2.0)])

        distance, matching = wasserstein(a, PersistenceDiagram())

        assert distance == pytest.approx(math.sqrt(2.0))
        assert matching.pairs == [(0, DIAGONAL)]

    def test_prefers_the_close_partner(self):
        a = PersistenceDiagram.from_pairs([(0.0, 2.0)])
        b = PersistenceDiagram.from_pairs([(0.0, 3.0)])

        distance, matching = wasserstein(a, b)

        assert distance == pytest.approx(1.0)
        assert matching.pairs == [(0, 0)]
        assert matching.recompute(a, b) == pytest.approx(matching.cost)

    def test_identity_and_symmetry(self, rng):
        a, b = random_diagram(rng, 4), random_diagram(rng, 3)

        assert wasserstein(a, a)[0] == pytest.approx(0.0, abs=1e-12)
        assert wasserstein(a, b)[0] == pytest.approx(wasserstein(b, a)[0])

    def test_matching_covers_every_point(self, rng):
        a, b = random_diagram(rng, 4), random_diagram(rng, 6)

        _, matching = wasserstein(a, b)

        assert sorted(x for x, _ in matching.pairs if x != DIAGONAL) == [0, 1, 2, 3]
        assert sorted(y for _, y in matching.pairs if y != DIAGONAL) == list(range(6))

    def test_both_empty(self):
        distance, matching = wasserstein(PersistenceDiagram(), PersistenceDiagram())

        assert distance == 0.0
        assert matching.pairs == []

    def test_rejects_small_order(self):
        with pytest.raises(ParameterError):
            wasserstein(PersistenceDiagram(), PersistenceDiagram(), p=0.5)

    def test_rejects_mixed_dimensions(self):
        a = PersistenceDiagram([0], [0.0], [1.0])
        b = PersistenceDiagram([1], [0.0], [1.0])

        with pytest.raises(DiagramError):
            wasserstein(a, b)


class TestBottleneck:
    def test_matches_exhaustive_search(self, rng):
        for m, n in ((2, 2), (3, 2), (1, 0), (0, 4)):
            a, b = random_diagram(rng, m), random_diagram(rng, n)

            assert bottleneck(a, b) == pytest.approx(exhaustive_bottleneck(a, b))

    @pytest.mark.parametrize("seed", range(50))
    def test_matches_exhaustive_search_on_random_pairs(self, seed):
        rng = np.random.default_rng(seed)
        a = random_diagram(rng, rng.integers(0, 6))
        b = random_diagram(rng, rng.integers(0, 6))

        assert bottleneck(a, b) == pytest.approx(
            exhaustive_bottleneck(a, b), rel=0, abs=1e-9
        )

    @pytest.mark.parametrize("seed", range(100))
    def test_is_stable_under_field_noise(self, seed):
        rng = np.random.default_rng(seed)
        values = rng.random((8, 8))
        noise = rng.uniform(-0.05, 0.05, (8, 8))

        before = cubical_sublevel_diagram(values)
        after = cubical_sublevel_diagram(values + noise)

        for dim in (0, 1):
            assert bottleneck(
                before.in_dimension(dim), after.in_dimension(dim)
            ) <= np.abs(noise).max() + 1e-12

    def test_known_values(self):
        a = PersistenceDiagram.from_pairs([(0.0, 4.0)])
        b = PersistenceDiagram.from_pairs([(1.0, 5.0)])

        assert bottleneck(a, PersistenceDiagram()) == pytest.approx(2.0)
        assert bottleneck(a, b) == pytest.approx(1.0)
        assert bottleneck(PersistenceDiagram(), PersistenceDiagram()) == 0.0


def test_pairwise_wasserstein(rng):
    diagrams = [random_diagram(rng, count) for count in (1, 2, 3)]

    matrix = pairwise_wasserstein(diagrams)
    cross = pairwise_wasserstein(diagrams, diagrams[:2])

    assert np.allclose(matrix, matrix.T)
    assert np.all(np.diag(matrix) == 0.0)
    assert matrix[0, 2] == pytest.approx(wasserstein(diagrams[0], diagrams[2], 1.0)[0])
    assert cross.shape == (3, 2)
    assert np.allclose(cross, matrix[:, :2])


class TestLandscape:
    def test_single_tent(self):
        dgm = PersistenceDiagram.from_pairs([(0.0, 2.0)])

        result = landscape(dgm, levels=2, grid=[0.0, 0.5, 1.0, 1.5, 2.0])

        assert result.values[0].tolist() == [0.0, 0.5, 1.0, 0.5, 0.0]
        assert result.values[1].tolist() == [0.0] * 5
        assert result.vector.shape == (10,)

    def test_levels_are_ordered(self):
        dgm = PersistenceDiagram.from_pairs([(0.0, 2.0), (0.5, 1.5), (0.0, 4.0)])

        result = landscape(dgm, levels=3, grid=np.linspace(0, 4, 41))

        assert np.all(np.diff(result.values, axis=0) <= 0.0)
        assert result.values[0].max() == pytest.approx(2.0)
        assert result.values[1, 10] == pytest.approx(1.0)
        assert result.values[2, 10] == pytest.approx(0.5)

    def test_empty_diagram_gives_zeros(self):
        result = landscape(PersistenceDiagram(), levels=3, grid=[0.0, 1.0])

        assert np.all(result.values == 0.0)

    def test_default_grid(self):
        dgm = PersistenceDiagram.from_pairs([(1.0, 3.0)])

        result = landscape(dgm, levels=1)

        assert result.grid[0] == 1.0
        assert result.grid[-1] == 3.0

    def test_invalid_arguments(self):
        dgm = PersistenceDiagram.from_pairs([(0.0, 1.0)])

        with pytest.raises(ParameterError):
            landscape(dgm, levels=0)
        with pytest.raises(ParameterError):
            landscape(dgm, grid=[1.0, 0.5])


def test_landscape_grid_spans_all_diagrams():
    first = PersistenceDiagram.from_pairs([(1.0, 2.0)])
    second = PersistenceDiagram.from_pairs([(0.5, 4.0)])

    grid = landscape_grid([first, second, PersistenceDiagram()], samples=8)

    assert (grid[0], grid[-1], len(grid)) == (0.5, 4.0, 8)


def test_landscape_grid_without_points():
    assert landscape_grid([PersistenceDiagram()], 3).tolist() == [0.0, 0.5, 1.0]


def test_landscape_grid_needs_two_samples():
    with pytest.raises(ParameterError):
        landscape_grid([], 1)


def test_stack_landscapes():
    dgm = PersistenceDiagram.from_pairs([(0.0, 1.0)])
    grid = np.linspace(0, 1, 5)

    matrix = stack_landscapes([landscape(dgm, 2, grid)] * 3)

    assert matrix.shape == (3, 10)


class TestBarycenter:
    def test_two_single_points(self):
        a = PersistenceDiagram.from_pairs([(0.0, 2.0)])
        b = PersistenceDiagram.from_pairs([(0.0, 4.0)])

        result = barycenter([a, b])

        assert result.diagram.finite_array() == pytest.approx(np.array([[0.0, 3.0]]))
        assert result.objective == pytest.approx(2.0)
        assert result.converged
        assert result.trace[0] == pytest.approx(4.0)

    def test_identical_inputs(self, rng):
        dgm = random_diagram(rng, 5)

        result = barycenter([dgm, dgm, dgm])

        assert result.diagram == dgm
        assert result.objective == 0.0
        assert result.iterations == 0

    def test_objective_is_reproduced_by_its_matchings(self, rng):
        diagrams = [random_diagram(rng, count) for count in (3, 4, 2, 5)]

        result = barycenter(diagrams)
        recomputed = sum(
            wasserstein(result.diagram, dgm, 2.0)[0] ** 2 for dgm in diagrams
        )

        assert result.objective == pytest.approx(recomputed)
        assert result.objective <= result.trace[0] + 1e-12
        assert all(
            later <= earlier + 1e-12
            for earlier, later in zip(result.trace, result.trace[1:])
        )

    def test_does_not_depend_on_input_order(self, rng):
        diagrams = [random_diagram(rng, count) for count in (3, 4, 2)]

        forward = barycenter(diagrams)
        backward = barycenter(diagrams[::-1])

        assert forward.diagram == backward.diagram
        assert forward.objective == backward.objective

    def test_single_input(self, rng):
        dgm = random_diagram(rng, 3)

        assert barycenter([dgm]).diagram == dgm

    def test_empty_diagrams(self):
        result = barycenter([PersistenceDiagram(), PersistenceDiagram()])

        assert result.diagram.is_empty()
        assert result.objective == 0.0

    def test_errors(self):
        with pytest.raises(DiagramError):
            barycenter([])
        with pytest.raises(DiagramError):
            barycenter([
                PersistenceDiagram([0], [0.0], [1.0]),
                PersistenceDiagram([1], [0.0], [1.0]),
            ])


def test_w1_gaussian_kernel(rng):
    a, b = random_diagram(rng, 3), random_diagram(rng, 2)
    distance = wasserstein(a, b, 1.0)[0]

    assert w1_gaussian_kernel(a, a, 2.0) == pytest.approx(1.0)
    assert w1_gaussian_kernel(a, b, 2.0) == pytest.approx(math.exp(-distance / 4.0))
    with pytest.raises(ParameterError):
        w1_gaussian_kernel(a, b, 0.0)


def test_kernel_matrix():
    gram = kernel_matrix(np.array([[0.0, 4.0], [4.0, 0.0]]), 2.0)

    assert np.allclose(gram, [[1.0, math.exp(-1.0)], [math.exp(-1.0), 1.0]])
    with pytest.raises(ParameterError):
        kernel_matrix(np.zeros((1, 1)), -1.0)
