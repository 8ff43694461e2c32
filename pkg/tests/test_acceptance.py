"""Acceptance criteria 1-10, each at its stated tolerance and budget."""

import math
import time

import numpy as np
import pytest

from hypernorm import catalog
from hypernorm.engine import integrate, integrate_batch, norm, tensor_function
from hypernorm.geometry import (
    analytic_l2_modulus,
    check_clarkson,
    check_hanner,
    estimate_K,
    estimate_modulus,
    figure_values,
    two_point_constant,
)
from hypernorm.inequalities import (
    TrialConfig,
    gen_pseudorandom_sign,
    search_triangle_violation,
    verify_bonami_beckner,
    verify_factor_equality,
    verify_first_holder,
    verify_gowers_approx,
    verify_gowers_cs,
    verify_general_holder,
    verify_lattice_concavity,
    verify_lattice_convexity,
    verify_norm_monotonicity,
)
from hypernorm.measure import DiscreteMeasureSpace, GridFunction
from hypernorm.pair import HypergraphPair, scale
from hypernorm.rng import sample_values, stream


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_criterion_1_schatten_oracle(record):
    start = time.perf_counter()
    worst = 0.0
    for seed in range(200):
        rng = stream(seed, 1001)
        n = int(rng.integers(2, 6))
        a = sample_values(rng, (n, n), "complex")
        f = GridFunction.from_array(a, counting=True)
        for m in (2, 3):
            want = max(float(np.trace(np.linalg.matrix_power(a @ a.conj().T, m)).real), 0.0) ** (1 / (2 * m))
            worst = max(worst, rel(norm(catalog.make_schatten(2 * m), f), want))
    wall = time.perf_counter() - start
    ok = worst <= 1e-10 and wall < 10
    record(1, ok, f"Schatten oracle: worst rel {worst:.2e} (<=1e-10), {wall:.2f}s (<10s)")
    assert ok


def test_criterion_2_lp_oracle(record):
    start = time.perf_counter()
    worst = 0.0
    for p in (1, 2, 3.5, 4):
        h = catalog.make_lp(p)
        for seed in range(200):
            rng = stream(seed, 1002, int(p * 10))
            n = int(rng.integers(1, 17))
            w = rng.uniform(0.1, 2.0, n)
            vals = sample_values(rng, (n,), "complex")
            direct = math.fsum(w * np.abs(vals) ** p) ** (1 / p)
            worst = max(worst, rel(norm(h, GridFunction(DiscreteMeasureSpace(w), vals)), direct))
    wall = time.perf_counter() - start
    ok = worst <= 1e-12 and wall < 5
    record(2, ok, f"L_p oracle: worst rel {worst:.2e} (<=1e-12), {wall:.2f}s (<5s)")
    assert ok


def test_criterion_3_u2_s4_identity(record):
    worst = 0.0
    u2 = catalog.make_gowers(2)
    for seed in range(100):
        rng = stream(seed, 1003)
        n = int(rng.integers(1, 5))
        a = sample_values(rng, (n, n), "complex")
        want = float(np.trace(np.linalg.matrix_power(a @ a.conj().T, 2)).real)
        worst = max(worst, rel(norm(u2, GridFunction.from_array(a, counting=True)) ** 4, want))
    ok = worst <= 1e-10
    record(3, ok, f"U_2^4 = Tr((FF*)^2): worst rel {worst:.2e} (<=1e-10)")
    assert ok


def test_criterion_4_classification(record):
    from hypernorm.structure import classify

    expected = []
    for p in (1, 2, 3):
        expected.append((f"L_{p}", catalog.make_lp(p), ("TypeI", p)))
    for k in (1, 2, 3):
        expected.append((f"U_{k}", catalog.make_gowers(k), ("TypeII", None)))
    for m in (2, 3):
        expected.append((f"S_{2 * m}", catalog.make_schatten(2 * m), ("TypeII", None)))
    for p, dims in ((1, [2, 2]), (1.5, [2, 3]), (2, [2, 2, 2])):
        expected.append((f"K=({p},{p}) on {dims}", catalog.make_complete(p, dims), ("TypeI", 2 * p)))
    expected.append(("3 S_4", scale(catalog.make_schatten(4), 3), ("NotSemiNorming", None)))
    expected.append(("2 U_2", catalog.two_u2(), ("NotSemiNorming", None)))
    expected.append(("sqrt2 pair", catalog.sqrt2_pair(), ("NotSemiNorming", None)))
    wrong = []
    for name, h, (verdict, s) in expected:
        r = classify(h)
        if r.verdict != verdict or (s is not None and (r.s is None or abs(r.s - s) > 1e-12)):
            wrong.append(f"{name}: {r.verdict}{'' if r.s is None else '{' + format(r.s, 'g') + '}'}")
    ok = not wrong
    record(4, ok, f"classification: {len(expected) - len(wrong)}/{len(expected)} agree" +
           ("" if ok else f" ({', '.join(wrong)})"))
    assert ok


@pytest.mark.parametrize("name", ["2U2", "sqrt2"])
def test_criterion_5_violations_found(record, name):
    h = catalog.two_u2() if name == "2U2" else catalog.sqrt2_pair()
    start = time.perf_counter()
    v = search_triangle_violation(h, TrialConfig(seed=0, omega_size=2), restarts=10_000)
    wall = time.perf_counter() - start
    gap = -math.inf if v is None else v.gap
    ok = v is not None and gap > 1e-6 and wall < 60
    record(5, ok, f"{name}: certified gap {gap:.3e} (>1e-6) in {wall:.1f}s (<60s)")
    assert ok
    nsum, nf, ng = (norm(h, v.f + v.g, method="brute"), norm(h, v.f, method="brute"), norm(h, v.g, method="brute"))
    assert nsum - nf - ng > 1e-6


@pytest.mark.parametrize("name", ["U2", "S4", "L2"])
def test_criterion_5_no_violation_for_norms(record, name):
    h = {"U2": catalog.make_gowers(2), "S4": catalog.make_schatten(4), "L2": catalog.make_lp(2)}[name]
    start = time.perf_counter()
    v = search_triangle_violation(h, TrialConfig(seed=0, omega_size=2), restarts=10_000)
    wall = time.perf_counter() - start
    ok = v is None
    record(5, ok, f"{name}: {'nothing found' if ok else f'gap {v.gap:.2e}'} in 10^4 restarts ({wall:.1f}s)")
    assert ok


def _inequality_suite(n):
    cfg = TrialConfig(trials=1000, seed=n, omega_size=n)
    u2, s4, u3 = catalog.make_gowers(2), catalog.make_schatten(4), catalog.make_gowers(3)
    l3, k11 = catalog.make_lp(3), catalog.make_complete(1, [2, 2])
    split = [HypergraphPair.from_maps([2, 2], {(0, 1): 1.0, (1, 0): 1.0}),
             HypergraphPair.from_maps([2, 2], {}, {(0, 0): 1.0, (1, 1): 1.0})]
    diag = HypergraphPair.from_maps([2, 2], {(0, 0): 1.0, (1, 1): 1.0})
    sub_u2 = HypergraphPair.from_maps([2, 2], {(0, 1): 1.0}, {(0, 0): 1.0})
    sub_k = HypergraphPair.from_maps([2, 2], {(0, 0): 1.0}, {(0, 0): 1.0})
    return [
        ("first holder U_2", verify_first_holder(u2, (0, 1), cfg)),
        ("first holder S_4 beta", verify_first_holder(s4, (1, 0), cfg, side="beta")),
        ("first holder U_3", verify_first_holder(u3, (1, 0, 0), cfg)),
        ("general holder (a) S_4 thirds", verify_general_holder(s4, [scale(s4, 1 / 3)] * 3, cfg)),
        ("general holder (b) U_2 split", verify_general_holder(u2, split, cfg, mode="integer")),
        ("monotonicity (a)", verify_norm_monotonicity(u2, sub_u2, cfg, mode="a")),
        ("monotonicity (b)", verify_norm_monotonicity(k11, sub_k, cfg, mode="b")),
        ("monotonicity (c)", verify_norm_monotonicity(u2, sub_u2, cfg, mode="c")),
        ("gowers CS", verify_gowers_cs(diag, (0, 1), cfg)),
        ("gowers approx", verify_gowers_approx(diag, cfg)),
        ("factor equality U_2", verify_factor_equality(u2, cfg)),
        ("factor equality L_3", verify_factor_equality(l3, cfg)),
        ("lattice concavity L_3", verify_lattice_concavity(l3, cfg)),
        ("lattice concavity K", verify_lattice_concavity(k11, cfg)),
        ("lattice convexity L_3", verify_lattice_convexity(l3, cfg)),
        ("lattice convexity K", verify_lattice_convexity(k11, cfg)),
    ]


def test_criterion_6_inequality_suite(record):
    start = time.perf_counter()
    reports = _inequality_suite(2) + _inequality_suite(3)
    wall = time.perf_counter() - start
    worst_name, worst = min(((name, r.worst_margin) for name, r in reports), key=lambda t: t[1])
    ok = worst >= -1e-9 and all(r.trials >= 1000 for _, r in reports) and wall < 120
    record(6, ok, f"{len(reports)} checks x 10^3 trials at n=2,3: worst margin {worst:.2e} ({worst_name}), "
                  f"{wall:.1f}s (<120s)")
    assert ok


def test_criterion_7_two_point_constants(record):
    worst = 0.0
    for p in (1.5, 2, 3, 4, 6):
        want = figure_values(p)
        worst = max(worst, abs(two_point_constant("C", 2, p).value - want["C"]),
                    abs(two_point_constant("Cstar", 2, p).value - want["Cstar"]))
    bb = [verify_bonami_beckner(p, q, TrialConfig(trials=10_000, seed=7)) for p, q in ((2, 4), (1.5, 3))]
    bb_worst = min(r.worst_margin for r in bb)
    ok = worst <= 1e-3 and bb_worst >= -1e-9
    record(7, ok, f"C, C* max abs error {worst:.2e} (<=1e-3); two-point inequality worst margin {bb_worst:.2e} "
                  "on 10^4 samples")
    assert ok


def test_criterion_8_geometry(record):
    u2 = catalog.make_gowers(2)
    root3 = math.sqrt(3)
    est = estimate_K(u2, 2, 4, TrialConfig(trials=10_000, seed=0))
    k_ok = est.directed_bound >= root3 - 0.02 and est.sampled_bound <= root3 + 1e-6
    cfg = TrialConfig(trials=1000, seed=8)
    hanner = check_hanner(u2, cfg)
    clarkson = check_clarkson(u2, cfg)
    grid = [0.25, 0.5, 1.0]
    rho = estimate_modulus(catalog.make_lp(2), "smoothness", grid, TrialConfig(trials=500, seed=0, omega_size=3))
    rho_err = max(abs(a - b) for a, b in zip(rho.values, analytic_l2_modulus("smoothness", grid)))
    ok = k_ok and hanner.passed and clarkson.passed and rho_err <= 1e-3
    record(8, ok, f"K_2,4(U_2): directed {est.directed_bound:.5f} (>= sqrt3-0.02), max sampled "
                  f"{est.sampled_bound:.5f} (<= sqrt3+1e-6); Hanner {hanner.worst_margin:.2e}, Clarkson "
                  f"{clarkson.worst_margin:.2e}; rho error {rho_err:.2e} (<=1e-3)")
    assert ok


def test_criterion_9_pseudorandom_sign(record):
    good, zero, norms = 0, 0, []
    for seed in range(100):
        s = gen_pseudorandom_sign(64, 2, seed)
        zero += s.integral == 0
        good += s.u_norm <= 0.35
        norms.append(s.u_norm)
    ok = zero == 100 and good >= 95
    record(9, ok, f"integral exactly 0 for {zero}/100 seeds; ||g||_U2 <= 0.35 for {good}/100 (need >= 95); "
                  f"observed range [{min(norms):.4f}, {max(norms):.4f}], floor m^(-1/4) = {64 ** -0.25:.4f}")
    assert ok


def test_criterion_9_floor_explains_outcome():
    # any +-1 matrix on [m]^2 has ||g||_U2 >= m^(-1/4), which exceeds 0.35 at m = 64
    assert 64 ** -0.25 > 0.35
    for seed in range(10):
        assert gen_pseudorandom_sign(64, 2, seed).u_norm >= 64 ** -0.25 - 1e-12


def _random_instance(seed):
    rng = stream(seed, 1010)
    k = int(rng.integers(1, 4))
    dims = [int(rng.integers(1, 4)) for _ in range(k)]
    cells = [tuple(int(rng.integers(0, d)) for d in dims) for _ in range(int(rng.integers(1, 6)))]
    alpha = {c: float(rng.choice([0.5, 1.0, 1.5, 2.0])) for c in cells}
    beta = {c: float(rng.choice([0.0, 0.5, 1.0])) for c in cells}
    h = HypergraphPair.from_maps(dims, alpha, beta)
    n = int(rng.integers(2, 4))
    space = DiscreteMeasureSpace(rng.uniform(0.3, 1.0, n))
    return h, GridFunction(space, sample_values(rng, (n,) * k, "complex")), rng


def _integer_phase(h):
    # alpha - beta integer on every entry: the principal-branch kernel is then multiplicative
    beta = {o: a + 1.0 if i % 2 else a for i, (o, a) in enumerate(sorted(h.alpha.items()))}
    return HypergraphPair.from_maps(h.dims, h.alpha, beta)


def _tensor_error(h, f, g):
    lhs = integrate(h, tensor_function(f, g))
    rhs = integrate(h, f) * integrate(h, g)
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


def test_criterion_10_engine_self_consistency(record):
    plan_worst = par_worst = tensor_worst = 0.0
    for seed in range(100):
        h, f, rng = _random_instance(seed)
        brute = integrate(h, f, method="brute")
        plan_worst = max(plan_worst, abs(integrate(h, f, method="planned") - brute) / max(abs(brute), 1e-300))
        for method in ("brute", "planned"):
            serial = integrate(h, f, method=method, threads=1)
            par = integrate(h, f, method=method, threads=8)
            par_worst = max(par_worst, abs(par - serial) / max(abs(serial), 1e-300))
        g_space = DiscreteMeasureSpace(rng.uniform(0.3, 1.0, 2))
        # complex f, g with integer alpha - beta
        g = GridFunction(g_space, sample_values(rng, (2,) * h.k, "complex"))
        tensor_worst = max(tensor_worst, _tensor_error(_integer_phase(h), f, g))
        # arbitrary real weights with nonnegative f, g
        fa, ga = f.abs(), GridFunction(g_space, sample_values(rng, (2,) * h.k, "nonnegative"))
        tensor_worst = max(tensor_worst, _tensor_error(h, fa, ga))
    ok = plan_worst <= 1e-9 and par_worst <= 1e-12 and tensor_worst <= 1e-10
    record(10, ok, f"planned vs brute {plan_worst:.2e} (<=1e-9); 8 threads vs serial {par_worst:.2e} (<=1e-12); "
                   f"tensor identity {tensor_worst:.2e} (<=1e-10) on 2x100 instances")
    assert ok
