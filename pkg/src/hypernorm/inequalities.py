"""Seeded randomized checks of the Hölder-type inequalities for ``||.||_H``.

Every verifier draws its trials in fixed-size blocks; block ``b`` takes its
measure space from ``stream(seed, 1, b)`` and its functions from
``stream(seed, 2, b)``.  Reports are therefore identical for identical
configurations, whatever the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .catalog import make_gowers
from .engine import integrate, integrate_batch, integrate_mixed_batch, norm_from_integral
from .measure import DiscreteMeasureSpace, GridFunction
from .pair import WEIGHT_TOL, HypergraphPair, conjugate, delta, disjoint_union, sub
from .rng import sample_values, sample_weights, stream
from .structure import classify

BLOCK = 250


@dataclass(frozen=True)
class TrialConfig:
    trials: int = 1000
    seed: int = 0
    omega_size: int = 2
    amplitude: float = 1.0
    tolerance: float = 1e-9
    threads: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.omega_size < 1:
            raise ValueError("omega_size must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if not self.amplitude > 0:
            raise ValueError("amplitude must be > 0")


def _encode(x):
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return np.stack([x.real, x.imag], axis=-1).tolist()
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, dict):
        return {str(k): _encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_encode(v) for v in x]
    return x


@dataclass
class InequalityReport:
    inequality: str
    trials: int
    worst_margin: float
    witness: dict
    #: ``None`` in exploration mode, where margins are evidence only
    passed: bool | None
    seed: int
    tolerance: float
    margins: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    details: dict = field(default_factory=dict)

    def to_dict(self, include_margins: bool = False) -> dict:
        out = {
            "inequality": self.inequality,
            "trials": self.trials,
            "worst_margin": self.worst_margin,
            "passed": self.passed,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "witness": _encode(self.witness),
            "details": _encode(self.details),
        }
        if include_margins:
            out["margins"] = self.margins.tolist()
        return out


def _blocks(trials: int):
    b = 0
    start = 0
    while start < trials:
        count = min(BLOCK, trials - start)
        yield b, count
        b += 1
        start += count


def _run(name: str, cfg: TrialConfig, k: int, draw: Callable, evaluate: Callable, *, probability: bool,
         explore: bool = False, details: dict | None = None) -> InequalityReport:
    """Drive ``draw``/``evaluate`` over all trial blocks and keep the worst margin."""
    n = cfg.omega_size
    shape = (n,) * k

    def one(block):
        b, count = block
        weights = sample_weights(stream(cfg.seed, 1, b), n, probability)
        space = DiscreteMeasureSpace(weights)
        data = draw(stream(cfg.seed, 2, b), count, shape)
        margins = np.asarray(evaluate(space, data), dtype=float)
        return weights, data, margins

    blocks = list(_blocks(cfg.trials))
    if cfg.threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            results = list(pool.map(one, blocks))
    else:
        results = [one(b) for b in blocks]
    all_margins = np.concatenate([m for _, _, m in results])
    worst_i = int(np.argmin(all_margins))
    bi, off = divmod(worst_i, BLOCK)
    weights, data, _ = results[bi]
    witness = {key: arr[off] for key, arr in data.items()}
    witness["weights"] = weights
    worst = float(all_margins[worst_i])
    passed = None if explore else bool(worst >= -cfg.tolerance)
    return InequalityReport(name, cfg.trials, worst, witness, passed, cfg.seed, cfg.tolerance, all_margins,
                            details or {})


def _draw(modes: dict[str, str], amplitude: float):
    def draw(rng, count, shape):
        return {key: sample_values(rng, (count,) + shape, mode, amplitude) for key, mode in modes.items()}
    return draw


def _norms(h: HypergraphPair, values: np.ndarray, space: DiscreteMeasureSpace) -> np.ndarray:
    return np.abs(integrate_batch(h, values, space)) ** (1.0 / h.size())


def _require_candidate(h: HypergraphPair, require: bool):
    if require:
        res = classify(h)
        if not res.semi_norming_candidate:
            raise ValueError(f"pair fails the semi-norming screen: {[c.name for c in res.failed]}")


# -- Hölder-type inequalities ----------------------------------------------

def verify_first_holder(h: HypergraphPair, psi, cfg: TrialConfig, *, side: str = "alpha",
                        require_semi_norming: bool = True) -> InequalityReport:
    """``|int f^(H - 1_psi) g^(1_psi)| <= ||f||^(|H|-1) ||g||`` (or the conjugate form)."""
    psi = tuple(psi)
    one = delta(h.dims, psi)
    if side == "alpha":
        if h.alpha.get(psi, 0.0) <= 0:
            raise ValueError(f"psi={psi} is not in supp(alpha)")
    elif side == "beta":
        if h.beta.get(psi, 0.0) <= 0:
            raise ValueError(f"psi={psi} is not in supp(beta)")
        one = conjugate(one)
    else:
        raise ValueError("side must be 'alpha' or 'beta'")
    rest = sub(h, one)
    if not rest.is_nonnegative:
        raise ValueError(f"H - 1_psi has a negative entry at psi={psi} (weight below 1)")
    _require_candidate(h, require_semi_norming)
    size = h.size()

    def evaluate(space, d):
        f, g = d["f"], d["g"]
        lhs = np.abs(integrate_mixed_batch([(rest, f), (one, g)], space))
        return _norms(h, f, space) ** (size - 1) * _norms(h, g, space) - lhs

    return _run(f"first_holder[{side}]", cfg, h.k, _draw({"f": "complex", "g": "complex"}, cfg.amplitude),
                evaluate, probability=False, explore=not require_semi_norming, details={"psi": list(psi)})


def _parts_sum_check(h: HypergraphPair, parts: Sequence[HypergraphPair]):
    if not parts:
        raise ValueError("need at least one part")
    total = HypergraphPair.zero(h.dims)
    for p in parts:
        if p.dims != h.dims:
            raise ValueError("parts must live on the grid of H")
        if not p.support:
            raise ValueError("parts must be nonzero")
        total = total + p
    diff = sub(total, h)
    if any(abs(v) > WEIGHT_TOL for _, v in diff.alpha_items + diff.beta_items):
        raise ValueError("parts do not sum to H")


def verify_general_holder(h: HypergraphPair, parts: Sequence[HypergraphPair], cfg: TrialConfig, *,
                          mode: str = "nonnegative", climb: int = 0,
                          require_semi_norming: bool = True) -> InequalityReport:
    """``|int f_1^H_1 ... f_m^H_m| <= prod ||f_i||^|H_i|``.

    ``mode`` is ``nonnegative`` (f_i >= 0), ``integer`` (integer-valued parts,
    complex f_i) or ``complex`` (neither hypothesis; exploration only).  With
    ``climb > 0`` the worst trials are refined by coordinate descent on the
    margin, which is how violations outside the hypotheses are found.
    """
    _parts_sum_check(h, parts)
    if mode == "integer" and not all(p.is_integer_valued for p in parts):
        raise ValueError("integer mode needs integer-valued parts")
    if mode not in ("nonnegative", "integer", "complex"):
        raise ValueError(f"unknown mode {mode!r}")
    _require_candidate(h, require_semi_norming)
    fmode = "nonnegative" if mode == "nonnegative" else "complex"
    keys = [f"f{i}" for i in range(len(parts))]
    sizes = [p.size() for p in parts]

    def margin_of(space, d):
        lhs = np.abs(integrate_mixed_batch([(p, d[key]) for p, key in zip(parts, keys)], space))
        rhs = np.ones_like(lhs)
        for key, s in zip(keys, sizes):
            rhs = rhs * _norms(h, d[key], space) ** s
        return rhs - lhs

    report = _run(f"general_holder[{mode}]", cfg, h.k, _draw({key: fmode for key in keys}, cfg.amplitude),
                  margin_of, probability=False, explore=(mode == "complex"),
                  details={"parts": len(parts)})
    if climb > 0:
        order = np.argsort(report.margins)[:climb]
        best = report
        for idx in order:
            bi, off = divmod(int(idx), BLOCK)
            d = _draw({key: fmode for key in keys}, cfg.amplitude)(stream(cfg.seed, 2, bi), BLOCK, (cfg.omega_size,) * h.k)
            start = {key: d[key][off] for key in keys}
            sp = DiscreteMeasureSpace(sample_weights(stream(cfg.seed, 1, bi), cfg.omega_size, False))
            x, m = _descend(start, lambda dd: margin_of(sp, dd), cfg.amplitude,
                            nonneg=(fmode == "nonnegative"))
            if m < best.worst_margin:
                witness = dict(x)
                witness["weights"] = sp.weights
                best = InequalityReport(best.inequality, best.trials, float(m), witness,
                                        None if mode == "complex" else bool(m >= -cfg.tolerance),
                                        cfg.seed, cfg.tolerance, best.margins, dict(best.details, climbed=True))
        report = best
    return report


def _descend(start: dict, objective: Callable, amplitude: float, *, sweeps: int = 60, decay: float = 0.7,
             nonneg: bool = False):
    """Coordinate descent on ``objective`` over the real and imaginary parts."""
    keys = list(start)
    x = {key: np.array(v, dtype=complex) for key, v in start.items()}

    def value(xx):
        return float(objective({key: v[None] for key, v in xx.items()})[0])

    cur = value(x)
    step = amplitude / 4
    for _ in range(sweeps):
        for key in keys:
            for i in range(x[key].size):
                for part in ((1.0,) if nonneg else (1.0, 1j)):
                    for sgn in (1.0, -1.0):
                        trial = {kk: vv.copy() for kk, vv in x.items()}
                        tf = trial[key].reshape(-1)
                        tf[i] += sgn * step * part
                        if nonneg:
                            tf[i] = max(tf[i].real, 0.0)
                        v = value(trial)
                        if v < cur:
                            x, cur = trial, v
                            break
        step *= decay
    return x, cur


def verify_norm_monotonicity(h: HypergraphPair, kpair: HypergraphPair, cfg: TrialConfig, *,
                             mode: str = "a") -> InequalityReport:
    """``| ||f||_K | <= ||f||_H`` on probability spaces, for ``K <= H``.

    ``mode``: ``a`` nonnegative f; ``b`` H of Type I; ``c`` integer-valued H and K.
    """
    if kpair.dims != h.dims:
        raise ValueError("K must live on the grid of H")
    if not kpair.support:
        raise ValueError("K must be nonzero")
    gap = sub(h, kpair)
    if not gap.is_nonnegative or not kpair.is_nonnegative:
        raise ValueError("K is not <= H entrywise")
    if mode == "b" and not all(abs(a - b) <= WEIGHT_TOL for _, a, b in h.entries()):
        raise ValueError("mode b needs H of Type I")
    if mode == "c" and not (h.is_integer_valued and kpair.is_integer_valued):
        raise ValueError("mode c needs integer-valued H and K")
    if mode not in ("a", "b", "c"):
        raise ValueError(f"unknown mode {mode!r}")
    fmode = "nonnegative" if mode == "a" else "complex"

    def evaluate(space, d):
        return _norms(h, d["f"], space) - _norms(kpair, d["f"], space)

    return _run(f"norm_monotonicity[{mode}]", cfg, h.k, _draw({"f": fmode}, cfg.amplitude), evaluate,
                probability=True)


def _sup(values: np.ndarray) -> np.ndarray:
    return np.abs(values).reshape(values.shape[0], -1).max(axis=1)


def verify_gowers_cs(h: HypergraphPair, psi, cfg: TrialConfig) -> InequalityReport:
    """``|int f^H g^(1_psi)| <= ||g||_(U_k) ||f||_inf^|H|`` for psi outside the support."""
    psi = tuple(psi)
    if h.alpha.get(psi, 0.0) != 0 or h.beta.get(psi, 0.0) != 0:
        raise ValueError(f"psi={psi} is in the support of H")
    one = delta(h.dims, psi)
    uk = make_gowers(h.k)
    size = h.size()

    def evaluate(space, d):
        f, g = d["f"], d["g"]
        lhs = np.abs(integrate_mixed_batch([(h, f), (one, g)], space)) if h.support else \
            np.abs(integrate_batch(one, g, space))
        return _norms(uk, g, space) * _sup(f) ** size - lhs

    return _run("gowers_cs", cfg, h.k, _draw({"f": "complex", "g": "complex"}, cfg.amplitude), evaluate,
                probability=True, details={"psi": list(psi)})


def verify_gowers_approx(h: HypergraphPair, cfg: TrialConfig, *, perturbation: float | None = None) -> InequalityReport:
    """``|int f^H - g^H| <= |H| ||f-g||_(U_k) max(||f||_inf, ||g||_inf)^(|H|-1)`` for ``H = (alpha, 0)``."""
    if h.beta_items:
        raise ValueError("H must have beta = 0")
    if any(abs(v - 1.0) > WEIGHT_TOL for _, v in h.alpha_items):
        raise ValueError("alpha must be zero-one valued")
    uk = make_gowers(h.k)
    size = h.size()

    def draw(rng, count, shape):
        f = sample_values(rng, (count,) + shape, "complex", cfg.amplitude)
        if perturbation is None:
            g = sample_values(rng, (count,) + shape, "complex", cfg.amplitude)
        else:
            g = f + perturbation * sample_values(rng, (count,) + shape, "complex", 1.0)
        return {"f": f, "g": g}

    def evaluate(space, d):
        f, g = d["f"], d["g"]
        lhs = np.abs(integrate_batch(h, f, space) - integrate_batch(h, g, space))
        m = np.maximum(_sup(f), _sup(g))
        return size * _norms(uk, f - g, space) * m ** (size - 1) - lhs

    return _run("gowers_approx", cfg, h.k, draw, evaluate, probability=True,
                details={"perturbation": perturbation})


def verify_factor_equality(h1: HypergraphPair, cfg: TrialConfig, *, conjugate_copy: bool = False) -> InequalityReport:
    """``||f||_(H1 ⊔ H1) = ||f||_H1``; margin is minus the relative difference."""
    other = conjugate(h1) if conjugate_copy else h1
    h = disjoint_union(h1, other)

    def evaluate(space, d):
        a = _norms(h, d["f"], space)
        b = _norms(h1, d["f"], space)
        return -np.abs(a - b) / np.maximum(b, 1e-300)

    return _run("factor_equality", cfg, h1.k, _draw({"f": "complex"}, cfg.amplitude), evaluate,
                probability=False)


def _type1_parameter(h: HypergraphPair) -> float:
    entries = h.entries()
    if not entries or not all(abs(a - b) <= WEIGHT_TOL and abs(a - entries[0][1]) <= WEIGHT_TOL
                              for _, a, b in entries):
        raise ValueError("pair must be of Type I")
    return 2 * entries[0][1]


def verify_lattice_concavity(h: HypergraphPair, cfg: TrialConfig, *, count: int = 3) -> InequalityReport:
    """``sum ||f_i||^|H| <= || (sum |f_i|^|H|)^(1/|H|) ||^|H|`` for Type I H."""
    _type1_parameter(h)
    size = h.size()
    keys = [f"f{i}" for i in range(count)]

    def evaluate(space, d):
        total = sum(np.abs(d[key]) ** size for key in keys)
        lhs = sum(np.abs(integrate_batch(h, d[key], space)) for key in keys)
        return np.abs(integrate_batch(h, total ** (1.0 / size), space)) - lhs

    return _run("lattice_concavity", cfg, h.k, _draw({key: "nonnegative" for key in keys}, cfg.amplitude),
                evaluate, probability=False)


def verify_lattice_convexity(h: HypergraphPair, cfg: TrialConfig, *, count: int = 3) -> InequalityReport:
    """``|| (sum |f_i|^s)^(1/s) || <= (sum ||f_i||^s)^(1/s)`` for Type I H with parameter s."""
    s = _type1_parameter(h)
    keys = [f"f{i}" for i in range(count)]

    def evaluate(space, d):
        total = sum(np.abs(d[key]) ** s for key in keys)
        rhs = sum(_norms(h, d[key], space) ** s for key in keys) ** (1.0 / s)
        return rhs - _norms(h, total ** (1.0 / s), space)

    return _run("lattice_convexity", cfg, h.k, _draw({key: "nonnegative" for key in keys}, cfg.amplitude),
                evaluate, probability=False)


def verify_zero_one_lower_bound(h: HypergraphPair, cfg: TrialConfig) -> InequalityReport:
    """``int f^H >= ||f||_1^(|V_1|...|V_k|)`` for zero-one f on probability spaces."""
    cells = math.prod(h.dims)

    def evaluate(space, d):
        f = d["f"]
        return integrate_batch(h, f, space).real - _l1(f, space.weights) ** cells

    return _run("zero_one_lower_bound", cfg, h.k, _draw({"f": "zero_one"}, cfg.amplitude), evaluate,
                probability=True)


def _l1(f: np.ndarray, w: np.ndarray) -> np.ndarray:
    vals = np.abs(f)
    for _ in range(f.ndim - 1):
        vals = vals @ w
    return vals


def verify_bonami_beckner(p: float, q: float, cfg: TrialConfig) -> InequalityReport:
    """Two-point hypercontractivity on complex scalars with ``rho = sqrt((p-1)/(q-1))``."""
    if not 1 < p <= q:
        raise ValueError("need 1 < p <= q")
    rho = math.sqrt((p - 1) / (q - 1))

    def evaluate(space, d):
        x, y = d["x"][:, 0], d["y"][:, 0]
        lhs = ((np.abs(x + rho * y) ** q + np.abs(x - rho * y) ** q) / 2) ** (1 / q)
        rhs = ((np.abs(x + y) ** p + np.abs(x - y) ** p) / 2) ** (1 / p)
        return rhs - lhs

    cfg1 = TrialConfig(cfg.trials, cfg.seed, 1, cfg.amplitude, cfg.tolerance, cfg.threads)
    return _run(f"bonami_beckner[{p},{q}]", cfg1, 1, _draw({"x": "complex", "y": "complex"}, cfg.amplitude),
                evaluate, probability=False)


# -- pseudorandom signs ----------------------------------------------------

@dataclass
class PseudorandomSign:
    function: GridFunction
    u_norm: float
    integral: float
    flipped: int


def gen_pseudorandom_sign(m: int, k: int, seed: int) -> PseudorandomSign:
    """Balanced random ``±1`` function on ``[m]^k`` with the uniform measure.

    Independent signs are drawn first; the surplus sign is then flipped at the
    first entries of a seeded permutation until both signs are equally common.
    """
    if m < 2 or m % 2:
        raise ValueError(f"m must be an even integer >= 2, got {m}")
    rng = stream(seed, 0)
    total = m ** k
    vals = np.where(rng.random(total) < 0.5, 1.0, -1.0)
    surplus = int(vals.sum()) // 2
    flipped = 0
    if surplus:
        sign = 1.0 if surplus > 0 else -1.0
        for idx in rng.permutation(total):
            if flipped == abs(surplus):
                break
            if vals[idx] == sign:
                vals[idx] = -sign
                flipped += 1
    g = GridFunction(DiscreteMeasureSpace.uniform(m), vals.reshape((m,) * k))
    uk = make_gowers(k)
    u = norm_from_integral(integrate(uk, g), uk.size()).value
    integral = math.fsum(vals) / total
    return PseudorandomSign(g, u, integral, flipped)


# -- triangle violations ---------------------------------------------------

@dataclass
class Violation:
    f: GridFunction
    g: GridFunction
    gap: float
    norms: tuple[float, float, float]  # ||f+g||, ||f||, ||g||
    restart: int

    def to_dict(self) -> dict:
        return {"gap": self.gap, "norm_sum": self.norms[0], "norm_f": self.norms[1], "norm_g": self.norms[2],
                "restart": self.restart, "f": self.f.to_dict(), "g": self.g.to_dict()}


def _gaps(h: HypergraphPair, f: np.ndarray, g: np.ndarray, space: DiscreteMeasureSpace, method: str = "auto"):
    size = h.size()

    def nb(v):
        return np.abs(integrate_batch(h, v, space, method=method)) ** (1.0 / size)

    a, b, c = nb(f + g), nb(f), nb(g)
    return a - b - c, a, b, c


def search_triangle_violation(h: HypergraphPair, cfg: TrialConfig, *, restarts: int = 10_000, climb_top: int = 40,
                              per_block: int = 4, sweeps: int = 150,
                              space: DiscreteMeasureSpace | None = None) -> Violation | None:
    """Look for ``||f+g|| > ||f|| + ||g||`` by random restarts plus coordinate ascent.

    Restart blocks of 1000 cycle through four families: complex Gaussian,
    heavy-tailed moduli, ``x +- d`` around a heavy-tailed centre, and seeds
    from a negative-curvature probe (skipped when ``2 n^k > PROBE_MAX_DIM``).
    Each block contributes its ``per_block`` best pairs by relative gap; the
    best ``climb_top`` of those are climbed in rank order.
    Climbed pairs (falling back to the unclimbed seed) are rescaled so that ``max(|f|, |g|) = amplitude`` (the gap is
    homogeneous of degree one), then certified by a brute-force re-evaluation;
    the gap must beat ``max(tolerance, 1e-7 (||f|| + ||g||))``.
    """
    if not h.is_nonnegative or h.size() <= 0:
        raise ValueError("need a nonnegative pair with |H| > 0")
    n = cfg.omega_size
    shape = (n,) * h.k
    space = space or DiscreteMeasureSpace.counting(n)
    cands: list[tuple[float, int, np.ndarray, np.ndarray]] = []
    block = 1000
    probe_ok = 2 * n ** h.k <= PROBE_MAX_DIM
    for b, start in enumerate(range(0, restarts, block)):
        count = min(block, restarts - start)
        rng = stream(cfg.seed, 3, b)
        if probe_ok and RESTART_FAMILIES[b % len(RESTART_FAMILIES)] == "curvature":
            x = _heavy(rng, (count,) + shape, cfg.amplitude)
            cands.extend((r, start + i, f, g) for r, i, f, g in _curvature_pairs(h, x, space, per_block))
            continue
        f, g = _restart_pairs(rng, b, count, shape, cfg.amplitude)
        gap, a, nf, ng = _gaps(h, f, g, space)
        rel = gap / np.maximum(nf + ng, 1e-300)
        for i in np.argsort(-rel, kind="stable")[:per_block]:
            cands.append((float(rel[i]), start + int(i), f[i], g[i]))
    cands.sort(key=lambda c: (-c[0], c[1]))
    for rel, idx, f0, g0 in cands[:climb_top]:
        # climbing never lowers the relative gap, so a seed that already
        # violates is polished before it is certified
        f1, g1 = _climb(h, f0, g0, space, sweeps)
        for f, g in ((f1, g1), (f0, g0)):
            v = _certify(h, *_rescale(f, g, cfg.amplitude), space, cfg, idx)
            if v is not None:
                return v
    return None


def _rescale(f: np.ndarray, g: np.ndarray, amplitude: float):
    top = max(float(np.max(np.abs(f))), float(np.max(np.abs(g))))
    if top == 0:
        return f, g
    return f * (amplitude / top), g * (amplitude / top)


RESTART_FAMILIES = ("gaussian", "heavy", "antithetic", "curvature")
#: largest real dimension ``2 n^k`` for which the curvature probe runs
PROBE_MAX_DIM = 64
_PROBE_CHUNK = 64


def _norm_real(h: HypergraphPair, z: np.ndarray, shape, space: DiscreteMeasureSpace) -> np.ndarray:
    d = z.shape[1] // 2
    vals = (z[:, :d] + 1j * z[:, d:]).reshape((-1,) + tuple(shape))
    return np.abs(integrate_batch(h, vals, space)) ** (1.0 / h.size())


def _hessians(h: HypergraphPair, z: np.ndarray, eta: np.ndarray, shape, space) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference Hessians of the norm in real coordinates, one per row of ``z``."""
    b, r = z.shape
    eye = np.eye(r)
    pairs = [(i, j) for i in range(r) for j in range(i, r)]
    signs = ((1, 1), (1, -1), (-1, 1), (-1, -1))
    pts = [z] + [z + eta[:, None] * (si * eye[i] + sj * eye[j]) for i, j in pairs for si, sj in signs]
    vals = _norm_real(h, np.concatenate(pts), shape, space).reshape(len(pts), b)
    hess = np.zeros((b, r, r))
    for m, (i, j) in enumerate(pairs):
        pp, pm, mp, mm = vals[1 + 4 * m: 5 + 4 * m]
        hess[:, i, j] = hess[:, j, i] = (pp - pm - mp + mm) / (4 * eta ** 2)
    return vals[0], hess


def _curvature_pairs(h: HypergraphPair, x: np.ndarray, space: DiscreteMeasureSpace, keep: int):
    """Seeds from negative curvature.

    The norm is homogeneous of degree one, so it satisfies the triangle
    inequality exactly when it is convex.  At each point ``x`` the most
    negative Hessian direction ``v`` is estimated by finite differences; the
    ``keep`` most curved points are turned into ``f, g = x +- t v`` with ``t``
    picked on a log grid.
    """
    shape = x.shape[1:]
    flat = x.reshape(x.shape[0], -1)
    z = np.concatenate([flat.real, flat.imag], axis=1)
    scale = np.max(np.abs(flat), axis=1)
    lam = np.empty(len(z))
    vecs = np.empty_like(z)
    for c in range(0, len(z), _PROBE_CHUNK):
        sl = slice(c, c + _PROBE_CHUNK)
        val, hess = _hessians(h, z[sl], 1e-4 * scale[sl], shape, space)
        w, v = np.linalg.eigh(hess)
        with np.errstate(divide="ignore", invalid="ignore"):
            lam[sl] = np.where(val > 0, w[:, 0] * scale[sl] / val, 0.0)
        vecs[sl] = v[:, :, 0]
    out = []
    d = flat.shape[1]
    ts = np.logspace(-4, 0, 25)
    for i in np.argsort(lam, kind="stable")[:keep]:
        v = vecs[i, :d] + 1j * vecs[i, d:]
        step = (ts * scale[i])[:, None] * v[None, :]
        f = (flat[i][None, :] + step).reshape((-1,) + shape)
        g = (flat[i][None, :] - step).reshape((-1,) + shape)
        gap, _, nf, ng = _gaps(h, f, g, space)
        rel = gap / np.maximum(nf + ng, 1e-300)
        j = int(np.argmax(rel))
        out.append((float(rel[j]), int(i), f[j], g[j]))
    return out


def _heavy(rng: np.random.Generator, shape, amplitude: float) -> np.ndarray:
    """Moduli spread log-uniformly over four decades; phases or signs drawn at random."""
    mag = amplitude * 10.0 ** rng.uniform(-4, 0, shape)
    kind = rng.integers(0, 3, shape[:1]).reshape((-1,) + (1,) * (len(shape) - 1))
    phase = np.where(kind == 0, 1.0, np.where(kind == 1, np.sign(rng.standard_normal(shape)),
                                              np.exp(2j * np.pi * rng.random(shape))))
    return mag * phase


def _restart_pairs(rng: np.random.Generator, block: int, count: int, shape, amplitude: float):
    """Pairs for the Gaussian, heavy-tailed and ``x +- d`` (around a heavy centre) families."""
    fam = RESTART_FAMILIES[block % len(RESTART_FAMILIES)]
    full = (count,) + tuple(shape)
    if fam == "gaussian":
        return (sample_values(rng, full, "complex", amplitude), sample_values(rng, full, "complex", amplitude))
    if fam == "heavy":
        return _heavy(rng, full, amplitude), _heavy(rng, full, amplitude)
    # antithetic; also stands in for the curvature probe on large grids
    x = _heavy(rng, full, amplitude)
    d = _heavy(rng, full, amplitude) * rng.uniform(0, 0.5, (count,) + (1,) * len(shape))
    return x + d, x - d


def _certify(h, f, g, space, cfg, idx) -> Violation | None:
    gap, a, nf, ng = _gaps(h, f[None], g[None], space, method="brute")
    gap, a, nf, ng = float(gap[0]), float(a[0]), float(nf[0]), float(ng[0])
    if gap > max(cfg.tolerance, 1e-7 * (nf + ng)):
        return Violation(GridFunction(space, f), GridFunction(space, g), gap, (a, nf, ng), idx)
    return None


PATTERN_MOVES = 60


def coordinate_ascent(x: np.ndarray, objective: Callable[[np.ndarray], np.ndarray], step: float, *,
                      sweeps: int = 60, decay: float = 0.7, project: Callable | None = None,
                      relative: bool = False):
    """Maximise ``objective`` by moving one real or imaginary coordinate at a time.

    ``objective`` maps a ``(B, D)`` complex batch to ``B`` values; each
    coordinate tries ``+-step`` and ``+-i step`` in one batch.  The step shrinks
    by ``decay`` after every sweep.  With ``relative=True`` each coordinate
    keeps its own step, measured as a fraction of its modulus, which grows
    after a successful move and shrinks after a failed one; small entries then
    move on their own scale.  After every sweep the net displacement is
    extrapolated (a Hooke-Jeeves pattern move), which follows narrow ridges.
    """
    x = np.array(x, dtype=complex)
    if project is not None:
        x = project(x[None])[0]
    cur = float(objective(x[None])[0])
    moves = np.array([1, -1, 1j, -1j])
    steps = np.full(x.size, float(step))
    for _ in range(sweeps):
        base = x
        floor = 1e-6 * max(float(np.max(np.abs(x))), 1e-300)
        for i in range(x.size):
            trial = np.repeat(x[None], 4, axis=0)
            size = steps[i] * max(abs(x[i]), floor) if relative else steps[i]
            trial[:, i] += size * moves
            if project is not None:
                trial = project(trial)
            vals = objective(trial)
            j = int(np.argmax(vals))
            if vals[j] > cur:
                x, cur = trial[j], float(vals[j])
                if relative:
                    steps[i] = min(steps[i] * 1.5, 1.0)
            elif relative:
                steps[i] *= 0.5
        if not relative:
            steps *= decay
        # pattern move: keep extrapolating the sweep's net displacement while it helps
        d = x - base
        for _ in range(PATTERN_MOVES):
            if not np.any(d):
                break
            trial = (x + d)[None]
            if project is not None:
                trial = project(trial)
            val = float(objective(trial)[0])
            if not (np.isfinite(val) and val > cur):
                break
            x, cur = trial[0], val
            d = 2 * d
    return x, cur


def _climb(h, f, g, space, sweeps):
    """Coordinate ascent on the relative gap over the 4 n^k real coordinates, with per-entry relative steps."""
    half = f.size
    shape = f.shape

    def rel_gap(xs: np.ndarray) -> np.ndarray:
        ff = xs[:, :half].reshape((-1,) + shape)
        gg = xs[:, half:].reshape((-1,) + shape)
        gap, _, nf, ng = _gaps(h, ff, gg, space)
        return gap / np.maximum(nf + ng, 1e-300)

    x0 = np.concatenate([f.reshape(-1), g.reshape(-1)])
    def unit(xs: np.ndarray) -> np.ndarray:
        # the relative gap is scale invariant; pinning the scale avoids drift
        top = np.max(np.abs(xs), axis=1, keepdims=True)
        return xs / np.where(top > 0, top, 1.0)

    x, _ = coordinate_ascent(x0, rel_gap, 0.25, sweeps=sweeps, relative=True, project=unit)
    return x[:half].reshape(shape), x[half:].reshape(shape)
