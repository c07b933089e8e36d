import numpy as np
import pytest

from topocell.core.struct.diagramobject import (
    CUBICAL,
    RIPS,
    FiltrationSpec,
    PersistenceDiagram,
)
from topocell.errors import DiagramError


class TestFiltrationSpec:
    def test_defaults(self):
        spec = FiltrationSpec()

        assert (spec.mode, spec.max_dimension, spec.max_scale) == (RIPS, 1, None)

    def test_unknown_mode(self):
        with pytest.raises(DiagramError):
            FiltrationSpec("alpha")

    def test_unsupported_dimension(self):
        with pytest.raises(DiagramError):
            FiltrationSpec(RIPS, 2)

    def test_non_positive_scale(self):
        with pytest.raises(DiagramError):
            FiltrationSpec(RIPS, 1, 0.0)

    def test_scale_is_ignored_for_cubical(self):
        assert FiltrationSpec(CUBICAL, 1, -1.0).mode == CUBICAL


class TestPersistenceDiagram:
    def test_points_are_sorted_canonically(self):
        dgm = PersistenceDiagram(
            [1, 0, 1, 0], [2.0, 0.0, 1.0, 0.0], [3.0, 4.0, 5.0, 2.0]
        )

        assert dgm.dims.tolist() == [0, 0, 1, 1]
        assert dgm.finite_array().tolist() == [
            [0.0, 2.0], [0.0, 4.0], [1.0, 5.0], [2.0, 3.0]
        ]

    def test_cells_follow_their_points(self):
        dgm = PersistenceDiagram(
            [1, 1], [3.0, 1.0], [4.0, 2.0], [(7, 8), (1, 2)], [(7, 8, 9), (1, 2, 3)]
        )

        assert dgm.birth_cells == [(1, 2), (7, 8)]
        assert dgm.death_cells == [(1, 2, 3), (7, 8, 9)]

    def test_equality_ignores_input_order(self):
        first = PersistenceDiagram.from_pairs([(0, 1), (2, 5)])
        second = PersistenceDiagram.from_pairs([(2, 5), (0, 1)])

        assert first == second
        assert hash(first) == hash(second)
        assert first != PersistenceDiagram.from_pairs([(0, 1)])

    def test_summaries(self):
        dgm = PersistenceDiagram.from_pairs([(0, 1), (2, 5)], dim=1)

        assert dgm.persistence.tolist() == [1.0, 3.0]
        assert dgm.total_persistence == 4.0
        assert dgm.dimension == 1
        assert len(dgm) == 2

    def test_mixed_and_empty_dimension(self):
        mixed = PersistenceDiagram([0, 1], [0.0, 0.0], [1.0, 1.0])

        assert mixed.dimension is None
        assert PersistenceDiagram().dimension is None
        assert PersistenceDiagram().is_empty()

    def test_subsets(self):
        dgm = PersistenceDiagram([0, 1, 1], [0.0, 1.0, 2.0], [3.0, 1.5, 2.0 + 1e-12])

        assert len(dgm.in_dimension(1)) == 2
        assert len(dgm.in_dimensions((0, 1))) == 3
        assert len(dgm.without_degenerate(1e-9)) == 2

    def test_finite_array_of_empty_diagram(self):
        assert PersistenceDiagram().finite_array().shape == (0, 2)

    @pytest.mark.parametrize(
        "dims, births, deaths",
        [
            ([0], [1.0], [0.5]),
            ([2], [0.0], [1.0]),
            ([1], [0.0], [np.inf]),
            ([1, 1], [0.0], [1.0]),
        ],
    )
    def test_invalid_points(self, dims, births, deaths):
        with pytest.raises(DiagramError):
            PersistenceDiagram(dims, births, deaths)

    def test_arrays_are_read_only(self):
        dgm = PersistenceDiagram.from_pairs([(0, 1)])

        with pytest.raises(ValueError):
            dgm.births[0] = 5.0
