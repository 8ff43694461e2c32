import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypernorm import catalog
from hypernorm.engine import norm
from hypernorm.measure import DiscreteMeasureSpace, GridFunction
from hypernorm.rng import sample_values, stream


def test_family_validation():
    with pytest.raises(catalog.FamilyError):
        catalog.make_schatten(5)
    with pytest.raises(catalog.FamilyError):
        catalog.make_gowers(0)
    with pytest.raises(catalog.FamilyError):
        catalog.make_complete(0.25, [2])
    with pytest.warns(UserWarning):
        catalog.make_lp(0.5)


def test_gowers_pattern():
    u3 = catalog.make_gowers(3)
    assert u3.alpha[(1, 0, 0)] == 1 and u3.beta[(1, 1, 0)] == 1
    assert len(u3.alpha) == len(u3.beta) == 4


def test_schatten_pattern_is_cyclic():
    s6 = catalog.make_schatten(6)
    assert set(s6.alpha) == {(0, 0), (1, 1), (2, 2)}
    assert set(s6.beta) == {(0, 2), (1, 0), (2, 1)}


@pytest.mark.parametrize("two_m", [4, 6, 8])
@pytest.mark.parametrize("seed", range(5))
def test_schatten_trace_vs_svd(two_m, seed):
    a = sample_values(stream(seed, 200), (4, 4), "complex")
    f = GridFunction.from_array(a, counting=True)
    want = catalog.schatten_svd(a, two_m)
    assert catalog.schatten_oracle(f, two_m) == pytest.approx(want, rel=1e-12)
    assert norm(catalog.make_schatten(two_m), f) == pytest.approx(want, rel=1e-10)


def test_schatten_oracle_requires_counting():
    f = GridFunction.from_array(np.eye(2))
    with pytest.raises(catalog.FamilyError):
        catalog.schatten_oracle(f, 4)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=1, max_size=8),
       st.sampled_from([1.0, 1.5, 2.0, 3.5, 4.0]))
def test_lp_matches_weighted_sum(vals, p):
    n = len(vals)
    w = np.linspace(0.5, 1.5, n)
    f = GridFunction(DiscreteMeasureSpace(w), vals)
    direct = math.fsum(wi * abs(v) ** p for wi, v in zip(w, vals)) ** (1 / p)
    assert norm(catalog.make_lp(p), f) == pytest.approx(direct, rel=1e-12, abs=1e-300)
    assert catalog.lp_oracle(f, p) == pytest.approx(direct, rel=1e-12, abs=1e-300)


def test_complete_grid_is_lp_of_entries():
    # K=(p,p) on a 2x2 grid: integrand factorizes into products of |f|^(2p)
    f = GridFunction(DiscreteMeasureSpace.uniform(2), [[1, 2], [0.5, -1j]])
    h = catalog.make_complete(1, [1, 1])
    assert norm(h, f) == pytest.approx(np.mean(np.abs(f.values) ** 2) ** 0.5)


@pytest.mark.parametrize("k_new", [1, 2])
@pytest.mark.parametrize("base", ["l2", "l4", "k11"])
def test_degenerate_extension_sees_only_the_average(base, k_new):
    b = {"l2": catalog.make_lp(2), "l4": catalog.make_lp(4), "k11": catalog.make_complete(1, [1, 1])}[base]
    ext = catalog.make_degenerate_extension(b, k_new)
    assert ext.pair.k == b.k + k_new
    assert ext.pair.size() == pytest.approx(b.size())
    sp = DiscreteMeasureSpace([0.2, 0.3, 0.5])
    f = GridFunction(sp, sample_values(stream(3, k_new), (3,) * ext.pair.k, "complex"))
    avg = catalog.average_axes(f, ext.new_axes)
    assert norm(ext.pair, f) == pytest.approx(norm(b, avg), rel=1e-10)


def test_degenerate_extension_rejects_bad_base():
    with pytest.raises(catalog.FamilyError):
        catalog.make_degenerate_extension(catalog.make_lp(3), 1)
    with pytest.raises(catalog.FamilyError):
        catalog.make_degenerate_extension(catalog.sqrt2_pair(), 1)
    with pytest.raises(catalog.FamilyError):
        catalog.make_degenerate_extension(catalog.make_lp(2), 0)
