import numpy as np
import pytest

from mfrl import Grid, PointSet, SheetSample
from mfrl.grid import read_sample_csv


def test_grid_points_row_major():
    g = Grid((np.array([0.1, 0.2]), np.array([0.5, 0.6, 0.7])))
    assert g.shape == (2, 3) and g.size == 6
    np.testing.assert_array_equal(g.points()[1], [0.1, 0.6])
    np.testing.assert_array_equal(g.points()[3], [0.2, 0.5])


@pytest.mark.parametrize("axes", [(np.array([0.5, 0.2]),), (np.array([1.2]),), (np.array([]),)])
def test_grid_validation(axes):
    with pytest.raises(ValueError):
        Grid(axes)


def test_pointset_validation():
    with pytest.raises(ValueError):
        PointSet([[0.5, -0.1]])


def test_sample_length_check():
    with pytest.raises(ValueError):
        SheetSample(Grid.uniform(3, 1), np.zeros(2))


def test_csv_round_trip_exact(rng):
    g = Grid((np.array([0.0, 1 / 3, 1.0]), np.array([0.1, 0.7])))
    s = SheetSample(g, rng.standard_normal(6) * 1e-7)
    back = read_sample_csv(s.to_csv())
    assert isinstance(back.grid, Grid)
    np.testing.assert_array_equal(back.values, s.values)
    np.testing.assert_array_equal(back.grid.points(), g.points())


def test_csv_round_trip_pointset(rng):
    s = SheetSample(PointSet([[0.3, 0.2], [0.1, 0.9], [0.3, 0.9]]), rng.standard_normal(3))
    back = read_sample_csv(s.to_csv())
    np.testing.assert_array_equal(back.values, s.values)
    np.testing.assert_array_equal(back.grid.points(), s.grid.points())
