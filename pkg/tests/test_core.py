import math

import numpy as np
import pytest

from tpwa.core import (
    AffinePiece,
    DataPoint,
    DataSet,
    FitConfig,
    IndexSet,
    PwaModel,
    assign_points,
    evaluate_model,
    max_residual,
    select_piece,
)
from tpwa.errors import DimensionMismatch, OutOfDomain
from tpwa.template import TemplateSpec


def two_piece_model():
    # f(x) = -x on [-1, 0], f(x) = 2x on [0, 1]; rect regions -x <= 1, x <= 0 etc.
    t = TemplateSpec.rectangular(1)
    left = AffinePiece([[-1.0]], [0.0], [0.0, 1.0], (1, 2))
    right = AffinePiece([[2.0]], [0.0], [1.0, 0.0], (2, 3))
    return PwaModel((left, right), t, epsilon=0.1)


class TestIndexSet:
    def test_sorted_unique(self):
        assert IndexSet([3, 1, 3, 2]) == (1, 2, 3)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            IndexSet([0, 1])

    def test_mask_roundtrip(self):
        I = IndexSet([1, 4, 7])
        assert I.mask == 0b1001001
        assert IndexSet.from_mask(I.mask) == I

    def test_full_and_zero_based(self):
        assert IndexSet.full(3) == (1, 2, 3)
        assert IndexSet([2, 5]).zero_based().tolist() == [1, 4]

    def test_issubset(self):
        assert IndexSet([2, 3]).issubset([1, 2, 3])
        assert not IndexSet([2, 4]).issubset([1, 2, 3])


class TestDataSet:
    def test_vectors_become_columns(self):
        data = DataSet([0.0, 1.0, 2.0], [1.0, 2.0, 3.0])
        assert (data.K, data.d, data.e) == (3, 1, 1)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            DataSet(np.zeros((3, 2)), np.zeros((4, 1)))

    def test_non_finite(self):
        with pytest.raises(ValueError):
            DataSet([0.0, math.nan], [1.0, 2.0])

    def test_read_only(self):
        data = DataSet([0.0, 1.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            data.X[0, 0] = 5.0

    def test_from_points_and_subset(self):
        data = DataSet.from_points([((0, 0), 1), ((1, 0), 2), ((0, 1), 3)])
        assert (data.K, data.d, data.e) == (3, 2, 1)
        sub = data.subset([1, 3])
        assert sub.Y[:, 0].tolist() == [1.0, 3.0]
        assert data.points[1] == DataPoint((1.0, 0.0), (2.0,))

    def test_from_points_mixed_dims(self):
        with pytest.raises(DimensionMismatch):
            DataSet.from_points([((0, 0), 1), ((1,), 2)])


class TestFitConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(epsilon=-0.1), dict(epsilon=0.1, tol=0), dict(epsilon=0.1, cover_period=0),
         dict(epsilon=0.1, out_of_domain_policy="clip")],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            FitConfig(**kwargs)

    def test_zero_epsilon_allowed(self):
        assert FitConfig(0.0).epsilon == 0.0


class TestEvaluation:
    def test_tie_goes_to_smallest_index(self):
        model = two_piece_model()
        assert model.containing([0.0]) == [0, 1]
        assert select_piece(model, [0.0]) == 0

    def test_values(self):
        model = two_piece_model()
        assert evaluate_model(model, [-0.5]).tolist() == [0.5]
        assert evaluate_model(model, [0.5]).tolist() == [1.0]

    def test_out_of_domain(self):
        model = two_piece_model()
        with pytest.raises(OutOfDomain):
            evaluate_model(model, [3.0])
        # nearest: x = 3 violates right by 2, left by 3
        assert select_piece(model, [3.0], policy="nearest") == 1

    def test_query_dimension(self):
        with pytest.raises(DimensionMismatch):
            evaluate_model(two_piece_model(), [0.0, 1.0])

    def test_residual_and_partition(self):
        model = two_piece_model()
        data = DataSet([-1.0, 0.0, 0.5], [1.0, 0.05, 1.0])
        assert max_residual(model, data) == pytest.approx(0.05)
        assert assign_points(model, data) == [(1, 2), (3,)]

    def test_model_shape_check(self):
        t = TemplateSpec.rectangular(2)
        with pytest.raises(DimensionMismatch):
            PwaModel((AffinePiece([[1.0]], [0.0], [1.0, 1.0]),), t, 0.1)
