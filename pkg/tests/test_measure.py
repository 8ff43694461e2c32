import numpy as np
import pytest

from hypernorm.measure import DiscreteMeasureSpace, GridFunction, diagonal_function


def test_space_validation():
    with pytest.raises(ValueError):
        DiscreteMeasureSpace([])
    with pytest.raises(ValueError):
        DiscreteMeasureSpace([1.0, 0.0])
    with pytest.raises(ValueError):
        DiscreteMeasureSpace([1.0, float("nan")])


def test_uniform_and_counting():
    assert DiscreteMeasureSpace.uniform(7).is_probability
    assert not DiscreteMeasureSpace.counting(2).is_probability
    assert DiscreteMeasureSpace.counting(3).total == 3


def test_product_space():
    a = DiscreteMeasureSpace([0.25, 0.75])
    b = DiscreteMeasureSpace([1.0, 2.0, 3.0])
    p = a.product(b)
    assert p.n == 6
    assert p.weights[1 * 3 + 2] == pytest.approx(0.75 * 3.0)


def test_function_shape_checks():
    sp = DiscreteMeasureSpace.counting(3)
    with pytest.raises(ValueError):
        GridFunction(sp, np.zeros((3, 2)))
    with pytest.raises(ValueError):
        GridFunction(sp, np.zeros(5))
    assert GridFunction(sp, np.zeros(9)).k == 2
    with pytest.raises(ValueError):
        GridFunction(sp, [1, np.inf, 0])


def test_values_are_read_only():
    f = GridFunction.constant(DiscreteMeasureSpace.uniform(2), 2)
    with pytest.raises(ValueError):
        f.values[0, 0] = 3


def test_arithmetic_requires_same_space():
    f = GridFunction.constant(DiscreteMeasureSpace.uniform(2), 1, 1)
    g = GridFunction.constant(DiscreteMeasureSpace.counting(2), 1, 1)
    with pytest.raises(ValueError):
        f + g
    assert ((2 * f - f) / 2).values.tolist() == [0.5, 0.5]
    assert (f * 1j).conj().values[0] == -1j


def test_json_round_trip():
    f = GridFunction(DiscreteMeasureSpace([0.1, 0.9]), [[1 + 2j, 0], [3, -1j]])
    g = GridFunction.from_json(f.to_json())
    assert g.space == f.space
    assert np.array_equal(g.values, f.values)


@pytest.mark.parametrize("bad", [
    {"k": 1, "n": 2, "weights": [1.0], "values": [[1, 0], [1, 0]]},
    {"k": 2, "n": 2, "weights": [1.0, 1.0], "values": [[1, 0]]},
    {"k": 1, "n": 2, "weights": [1.0, 1.0]},
])
def test_malformed_function_json(bad):
    with pytest.raises(ValueError):
        GridFunction.from_dict(bad)


def test_diagonal_function():
    f = diagonal_function([1, 2, 3], 3)
    assert f.values[1, 1, 1] == 2 and f.values[0, 1, 1] == 0
    assert np.count_nonzero(f.values) == 3
