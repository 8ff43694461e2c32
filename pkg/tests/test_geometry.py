import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypernorm import catalog
from hypernorm.geometry import (
    analytic_l2_modulus,
    check_clarkson,
    check_hanner,
    clarkson_margins,
    embedding_witness,
    estimate_K,
    estimate_modulus,
    figure_values,
    hanner_hypothesis,
    known_k_constant,
    two_point_constant,
)
from hypernorm.inequalities import TrialConfig
from hypernorm.measure import DiscreteMeasureSpace
from hypernorm.pair import disjoint_union
from hypernorm.rng import sample_values, stream

U2 = catalog.make_gowers(2)
CFG = TrialConfig(trials=400, seed=2)


@pytest.mark.parametrize("p", [1.5, 3, 6])
def test_two_point_constants_match_closed_forms(p):
    want = figure_values(p)
    assert two_point_constant("C", 2, p).value == pytest.approx(want["C"], abs=1e-4)
    assert two_point_constant("Cstar", 2, p).value == pytest.approx(want["Cstar"], abs=1e-4)


def test_two_point_constant_witness_attains_value():
    c = two_point_constant("C", 2, 4)
    x, y = c.x, c.y
    lhs = ((abs(x + y) ** 4 + abs(x - y) ** 4) / 2) ** 0.25
    assert lhs == pytest.approx(math.sqrt(abs(x) ** 2 + abs(c.value * y) ** 2), rel=1e-9)


def test_two_point_constant_ranges():
    with pytest.raises(ValueError):
        two_point_constant("C", 3, 2)
    with pytest.raises(ValueError):
        two_point_constant("Cstar", 1.5, 2)
    with pytest.raises(ValueError):
        two_point_constant("K", 2, 2)


def test_two_point_constant_is_monotone_in_p():
    vals = [two_point_constant("C", 1.5, p, grid=(128, 64)).value for p in (2, 3, 4)]
    assert vals == sorted(vals)


def test_known_k_constant():
    assert known_k_constant(U2, 2, 4, "smooth") == pytest.approx(math.sqrt(3))
    assert known_k_constant(U2, 2, 6, "smooth") == pytest.approx(math.sqrt(5))
    assert known_k_constant(catalog.make_lp(1.5), 2, 4, "smooth") is None
    assert known_k_constant(disjoint_union(U2, U2), 2, 4, "smooth") is None


def test_estimate_k_for_u2():
    est = estimate_K(U2, 2, 4, TrialConfig(trials=2000, seed=0))
    assert est.directed_bound >= math.sqrt(3) - 0.02
    assert est.sampled_bound <= math.sqrt(3) + 1e-6
    assert est.exact == pytest.approx(math.sqrt(3))


def test_estimate_k_rejects_non_candidates():
    with pytest.raises(ValueError):
        estimate_K(catalog.two_u2(), 2, 4, CFG)
    with pytest.raises(ValueError):
        estimate_K(U2, 3, 4, CFG)


def test_convex_k_estimate_is_finite():
    est = estimate_K(U2, 4, 2, CFG, kind="convex")
    assert est.lower_bound > 0 and est.exact is None


def test_hanner_hypothesis():
    assert hanner_hypothesis(U2)
    assert hanner_hypothesis(catalog.make_lp(4))
    assert not hanner_hypothesis(catalog.make_lp(3))
    assert not hanner_hypothesis(disjoint_union(U2, U2))


@pytest.mark.parametrize("h", [U2, catalog.make_schatten(4), catalog.make_lp(4), catalog.make_lp(1.5),
                               catalog.make_lp(2)])
def test_hanner_holds(h):
    rep = check_hanner(h, CFG)
    assert rep.passed


def test_hanner_direction_reverses_below_two():
    assert check_hanner(catalog.make_lp(1.5), CFG).details["direction"] == ">="
    assert check_hanner(catalog.make_lp(4), CFG).details["direction"] == "<="


def test_hanner_exploration_outside_hypothesis():
    rep = check_hanner(catalog.make_complete(1.5, [2, 2]), CFG)
    assert rep.passed is None and rep.details["exploration"]


@pytest.mark.parametrize("h", [U2, catalog.make_schatten(4), catalog.make_lp(2), catalog.make_lp(3)])
def test_clarkson_holds(h):
    rep = check_clarkson(h, CFG)
    assert rep.passed
    assert rep.details["dual_worst_margin"] >= -1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_clarkson_forms_are_related_by_substitution(seed):
    # with f' = f + g, g' = f - g the transformed margin is 2^(1/q) times the strong one
    rng = stream(seed, 77)
    space = DiscreteMeasureSpace.counting(2)
    f = sample_values(rng, (4, 2, 2), "complex")
    g = sample_values(rng, (4, 2, 2), "complex")
    strong, _ = clarkson_margins(U2, f, g, space)
    _, transformed = clarkson_margins(U2, f + g, f - g, space)
    assert np.allclose(transformed, 2 ** 0.25 * strong, rtol=1e-9, atol=1e-9)


def test_l2_smoothness_modulus_is_sampled_accurately():
    grid = [0.25, 0.5, 1.0]
    est = estimate_modulus(catalog.make_lp(2), "smoothness", grid, TrialConfig(trials=300, omega_size=3))
    assert est.direction == "lower" and est.samples == 300
    want = analytic_l2_modulus("smoothness", grid)
    for got, w in zip(est.values, want):
        assert got <= w + 1e-9
        assert got == pytest.approx(w, abs=1e-3)


def test_l2_convexity_modulus_is_an_upper_bound():
    grid = [0.3, 0.6]
    est = estimate_modulus(catalog.make_lp(2), "convexity", grid, TrialConfig(trials=100, omega_size=2),
                           climb_top=1, sweeps=10)
    want = analytic_l2_modulus("convexity", grid)
    assert est.direction == "upper"
    for got, w in zip(est.values, want):
        assert got >= w - 1e-9
    assert est.values == sorted(est.values)


def test_analytic_reference_path():
    est = estimate_modulus("l2", "smoothness", [1.0], CFG)
    assert est.direction == "exact" and est.values == [pytest.approx(math.sqrt(2) - 1)]
    with pytest.raises(ValueError):
        estimate_modulus("l3", "smoothness", [1.0], CFG)


@pytest.mark.parametrize("h", [U2, catalog.make_schatten(6), catalog.make_lp(3)])
def test_embedding_of_l_size(h):
    rep = embedding_witness(h, 4, samples=5)
    assert rep.passed and rep.max_rel_error <= 1e-10


def test_embedding_rejects_factorizable():
    with pytest.raises(ValueError):
        embedding_witness(disjoint_union(U2, U2), 3)
