"""Banach-space geometry of ``||.||_H``: two-point constants, smoothness and
convexity constants, Hanner and Clarkson inequalities, moduli, and the
diagonal embedding of ``l_|H|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import integrate_batch
from .inequalities import InequalityReport, TrialConfig, _draw, _run, coordinate_ascent
from .measure import DiscreteMeasureSpace, diagonal_function
from .pair import WEIGHT_TOL, HypergraphPair, factorize
from .rng import sample_values, stream
from .structure import classify

_GOLDEN = (math.sqrt(5) - 1) / 2
U_MIN = 1e-4


# -- two-point constants ---------------------------------------------------

@dataclass(frozen=True)
class TwoPointConstant:
    kind: str  # "C" or "Cstar"
    a: float  # t for C, r for C*
    b: float  # p for C, q for C*
    value: float
    x: complex
    y: complex

    def to_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a, "b": self.b, "value": self.value,
                "x": [self.x.real, self.x.imag], "y": [self.y.real, self.y.imag]}


def _mean_minus_one(rho, theta, p):
    """``(|1+y|^p + |1-y|^p)/2 - 1`` for ``y = rho e^(i theta)``, accurate for small rho."""
    c = 2 * rho * np.cos(theta)
    r2 = rho * rho
    up = np.expm1(p / 2 * np.log1p(c + r2))
    down = np.expm1(p / 2 * np.log1p(-c + r2))
    return (up + down) / 2


def _two_point_ratio(kind: str, a: float, b: float, u, theta):
    rho = np.tan(u)
    lhs_pow = np.expm1((a / b) * np.log1p(_mean_minus_one(rho, theta, b)))  # LHS^a - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == "C":
            return np.maximum(lhs_pow, 0.0) ** (1 / a) / rho
        return np.where(lhs_pow > 0, rho / np.where(lhs_pow > 0, lhs_pow, 1) ** (1 / a), np.inf)


def _golden_max(fun, lo: float, hi: float, tol: float):
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = fun(c), fun(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = fun(d)
    return (c, fc) if fc >= fd else (d, fd)


def two_point_constant(kind: str, a: float, b: float, *, grid: tuple[int, int] = (512, 256),
                       tol: float = 1e-6) -> TwoPointConstant:
    """Best constant in the scalar two-point inequality.

    ``kind="C"``: smallest C with ``((|x+y|^p+|x-y|^p)/2)^(1/p) <= (|x|^t+|Cy|^t)^(1/t)``.
    ``kind="Cstar"``: smallest C* with ``((|x+y|^q+|x-y|^q)/2)^(1/q) >= (|x|^r+|y/C*|^r)^(1/r)``.
    By homogeneity ``x = 1`` and ``y = tan(u) e^(i theta)``; the pair ``x = 0``
    contributes the value 1.
    """
    if kind == "C":
        if not (1 < a <= 2 and b > 1):
            raise ValueError("C(t, p) needs 1 < t <= 2 and p > 1")
    elif kind == "Cstar":
        if not (2 <= a and b > 1):
            raise ValueError("C*(r, q) needs 2 <= r and q > 1")
    else:
        raise ValueError("kind must be 'C' or 'Cstar'")
    nu, nt = grid
    us = np.linspace(U_MIN, math.pi / 2 - U_MIN, nu)
    ts = np.linspace(0.0, math.pi / 2, nt)
    vals = _two_point_ratio(kind, a, b, us[:, None], ts[None, :])
    i, j = np.unravel_index(int(np.nanargmax(vals)), vals.shape)
    u, th, best = float(us[i]), float(ts[j]), float(vals[i, j])
    if math.isfinite(best):
        du, dt = us[1] - us[0], ts[1] - ts[0]
        for _ in range(8):
            u_lo, u_hi = max(U_MIN, u - du), min(math.pi / 2 - U_MIN, u + du)
            u, best = _golden_max(lambda v: float(_two_point_ratio(kind, a, b, v, th)), u_lo, u_hi, tol)
            t_lo, t_hi = max(0.0, th - dt), min(math.pi / 2, th + dt)
            th, best = _golden_max(lambda v: float(_two_point_ratio(kind, a, b, u, v)), t_lo, t_hi, tol)
            du, dt = du / 2, dt / 2
    y = math.tan(u) * complex(math.cos(th), math.sin(th))
    if best < 1.0:
        return TwoPointConstant(kind, a, b, 1.0, 0j, 1 + 0j)
    return TwoPointConstant(kind, a, b, best, 1 + 0j, y)


def figure_values(p: float) -> dict[str, float]:
    """Closed forms for ``t = r = 2``: ``C(2,p) = max(1, sqrt(p-1))``, ``C*(2,p) = max(1, 1/sqrt(p-1))``."""
    return {"C": max(1.0, math.sqrt(p - 1)), "Cstar": max(1.0, math.sqrt(1 / (p - 1)))}


# -- smoothness / convexity constants --------------------------------------

@dataclass
class KConstantEstimate:
    kind: str  # "smooth" (K_{t,p}) or "convex" (K*_{r,q})
    t: float
    p: float
    lower_bound: float
    directed_bound: float
    sampled_bound: float
    witness: dict
    exact: float | None
    samples: int

    def to_dict(self) -> dict:
        w = {k: (np.stack([v.real, v.imag], -1).tolist() if isinstance(v, np.ndarray) else v)
             for k, v in self.witness.items()}
        return {"kind": self.kind, "t": self.t, "p": self.p, "lower_bound": self.lower_bound,
                "directed_bound": self.directed_bound, "sampled_bound": self.sampled_bound,
                "exact": self.exact, "samples": self.samples, "witness": w}


def _norm_batch(h: HypergraphPair, values: np.ndarray, space: DiscreteMeasureSpace) -> np.ndarray:
    return np.abs(integrate_batch(h, values, space)) ** (1.0 / h.size())


def _k_values(h, f, g, space, t, p, kind):
    nf, ng = _norm_batch(h, f, space), _norm_batch(h, g, space)
    plus, minus = _norm_batch(h, f + g, space), _norm_batch(h, f - g, space)
    lhs = ((plus ** p + minus ** p) / 2) ** (1 / p)
    excess = lhs ** t - nf ** t
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == "smooth":
            return np.where(ng > 0, np.maximum(excess, 0.0) ** (1 / t) / ng, 0.0)
        return np.where(excess > 0, ng / np.where(excess > 0, excess, 1) ** (1 / t), np.inf)


def known_k_constant(h: HypergraphPair, t: float, p: float, kind: str) -> float | None:
    """Exact ``K_{2,p}`` for non-factorizable Type II or Type I (s >= 2) pairs with ``|H| >= 2``."""
    if kind != "smooth" or abs(t - 2) > 1e-12:
        return None
    res = classify(h)
    fac = factorize(h)
    size = h.size()
    if len(fac.components) != 1 or fac.isolated or size < 2:
        return None
    if res.verdict == "TypeII" or (res.verdict == "TypeI" and res.s >= 2 - WEIGHT_TOL):
        return math.sqrt(max(size, p) - 1)
    return None


def estimate_K(h: HypergraphPair, t: float, p: float, cfg: TrialConfig, *, kind: str = "smooth",
               directed: int = 25) -> KConstantEstimate:
    """Sampled lower bound on ``K_{t,p}(l_H)`` (``kind="smooth"``) or ``K*_{t,p}`` (``"convex"``).

    Besides random pairs on counting measure, the directed family
    ``x = (a, a)``, ``y = (b, -b)`` on two points is pushed through the diagonal
    embedding of ``l_|H|``.
    """
    if kind == "smooth" and not (1 < t <= 2 and p > 1):
        raise ValueError("K_{t,p} needs 1 < t <= 2 and p > 1")
    if kind == "convex" and not (t >= 2 and p > 1):
        raise ValueError("K*_{r,q} needs r >= 2 and q > 1")
    if kind not in ("smooth", "convex"):
        raise ValueError("kind must be 'smooth' or 'convex'")
    res = classify(h)
    if not res.semi_norming_candidate:
        raise ValueError("pair fails the semi-norming screen")
    # directed witnesses on two points
    two = DiscreteMeasureSpace.counting(2)
    bs = np.logspace(-3, 1, directed)
    fd = np.stack([diagonal_function([1.0, 1.0], h.k).values] * directed)
    gd = np.stack([diagonal_function([b, -b], h.k).values for b in bs])
    kd = _k_values(h, fd, gd, two, t, p, kind)
    fin = np.where(np.isfinite(kd), kd, -np.inf)
    di = int(np.argmax(fin))
    directed_bound = float(fin[di])
    # random pairs
    n = cfg.omega_size
    space = DiscreteMeasureSpace.counting(n)
    shape = (n,) * h.k
    best, bw = -np.inf, None
    for b, start in enumerate(range(0, cfg.trials, 1000)):
        count = min(1000, cfg.trials - start)
        rng = stream(cfg.seed, 4, b)
        f = sample_values(rng, (count,) + shape, "complex", cfg.amplitude)
        g = sample_values(rng, (count,) + shape, "complex", cfg.amplitude) * rng.uniform(0, 1, (count,) + (1,) * h.k)
        kv = _k_values(h, f, g, space, t, p, kind)
        kv = np.where(np.isfinite(kv), kv, -np.inf)
        i = int(np.argmax(kv))
        if kv[i] > best:
            best, bw = float(kv[i]), (f[i], g[i])
    if directed_bound >= best:
        witness = {"source": "directed", "x": fd[di], "y": gd[di], "b": float(bs[di])}
    else:
        witness = {"source": "sampled", "x": bw[0], "y": bw[1]}
    return KConstantEstimate(kind, t, p, max(directed_bound, best), directed_bound, best, witness,
                             known_k_constant(h, t, p, kind), cfg.trials)


# -- Hanner and Clarkson ---------------------------------------------------

def hanner_hypothesis(h: HypergraphPair) -> bool:
    """Non-factorizable and either Type II or Type I with an even integer parameter."""
    fac = factorize(h)
    if len(fac.components) != 1:
        return False
    res = classify(h)
    if res.verdict == "TypeII":
        return True
    return res.verdict == "TypeI" and abs(res.s - round(res.s)) <= WEIGHT_TOL and round(res.s) % 2 == 0


def _classical_lp(h: HypergraphPair) -> float | None:
    """``p`` when ``h`` is a single-vertex ``L_p`` pair, else ``None``."""
    entries = h.entries()
    if h.k == 1 and len(entries) == 1 and abs(entries[0][1] - entries[0][2]) <= WEIGHT_TOL:
        return 2 * entries[0][1]
    return None


def check_hanner(h: HypergraphPair, cfg: TrialConfig, *, explore: bool | None = None) -> InequalityReport:
    """``||f+g||^|H| + ||f-g||^|H| <= (||f||+||g||)^|H| + | ||f||-||g|| |^|H|``.

    For ``L_p`` with ``p < 2`` the classical inequality reverses and the margin
    is negated accordingly.  Other pairs outside the theorem's hypothesis run in
    exploration mode (``passed`` is ``None``).
    """
    lp = _classical_lp(h)
    sign = -1.0 if lp is not None and lp < 2 else 1.0
    if explore is None:
        explore = lp is None and not hanner_hypothesis(h)
    size = h.size()

    def evaluate(space, d):
        f, g = d["f"], d["g"]
        nf, ng = _norm_batch(h, f, space), _norm_batch(h, g, space)
        ip = np.abs(integrate_batch(h, f + g, space))
        im = np.abs(integrate_batch(h, f - g, space))
        return sign * ((nf + ng) ** size + np.abs(nf - ng) ** size - ip - im)

    return _run("hanner", cfg, h.k, _draw({"f": "complex", "g": "complex"}, cfg.amplitude), evaluate,
                probability=False, explore=explore,
                details={"exploration": explore, "direction": "<=" if sign > 0 else ">="})


def check_clarkson(h: HypergraphPair, cfg: TrialConfig) -> InequalityReport:
    """Strong Clarkson inequality with ``q = |H|``, ``1/p + 1/q = 1``, and its transformed form.

    The report's margins are for
    ``((||f+g||^q + ||f-g||^q)/2)^(1/q) <= (||f||^p + ||g||^p)^(1/p)``;
    ``details["dual_worst_margin"]`` holds the worst margin of
    ``(||f||^q + ||g||^q)^(1/q) <= ((||f+g||^p + ||f-g||^p)/2)^(1/p)``.
    """
    q = h.size()
    if q < 2:
        raise ValueError("Clarkson check needs |H| >= 2")
    p = q / (q - 1)
    dual: list[float] = []

    def evaluate(space, d):
        f, g = d["f"], d["g"]
        nf, ng = _norm_batch(h, f, space), _norm_batch(h, g, space)
        a, b = _norm_batch(h, f + g, space), _norm_batch(h, f - g, space)
        strong = (nf ** p + ng ** p) ** (1 / p) - ((a ** q + b ** q) / 2) ** (1 / q)
        dual.append(float(np.min(((a ** p + b ** p) / 2) ** (1 / p) - (nf ** q + ng ** q) ** (1 / q))))
        return strong

    rep = _run("clarkson", cfg, h.k, _draw({"f": "complex", "g": "complex"}, cfg.amplitude), evaluate,
               probability=False, details={"q": q, "p": p})
    dual_worst = min(dual)
    rep.details["dual_worst_margin"] = dual_worst
    if rep.passed is not None:
        rep.passed = rep.passed and dual_worst >= -cfg.tolerance
    return rep


def clarkson_margins(h: HypergraphPair, f: np.ndarray, g: np.ndarray, space: DiscreteMeasureSpace):
    """``(strong, transformed)`` margins for one batch; used for the transform-consistency property."""
    q = h.size()
    p = q / (q - 1)
    nf, ng = _norm_batch(h, f, space), _norm_batch(h, g, space)
    a, b = _norm_batch(h, f + g, space), _norm_batch(h, f - g, space)
    strong = (nf ** p + ng ** p) ** (1 / p) - ((a ** q + b ** q) / 2) ** (1 / q)
    transformed = ((a ** p + b ** p) / 2) ** (1 / p) - (nf ** q + ng ** q) ** (1 / q)
    return strong, transformed


# -- moduli ----------------------------------------------------------------

@dataclass
class ModulusEstimate:
    kind: str  # "smoothness" or "convexity"
    grid: list[float]
    values: list[float]
    #: "lower" for smoothness, "upper" for convexity, "exact" for analytic references
    direction: str
    samples: int
    seed: int
    raw: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "grid": self.grid, "values": self.values, "direction": self.direction,
                "samples": self.samples, "seed": self.seed, "raw": self.raw}


def analytic_l2_modulus(kind: str, grid) -> list[float]:
    if kind == "smoothness":
        return [math.sqrt(1 + t * t) - 1 for t in grid]
    return [1 - math.sqrt(max(0.0, 1 - e * e)) for e in grid]


def _unit(h, xs, space):
    nrm = _norm_batch(h, xs, space)
    nrm = np.where(nrm > 0, nrm, 1.0)
    return xs / nrm.reshape((-1,) + (1,) * (xs.ndim - 1))


def _separate(h, x, y, space, eps):
    """Push unit ``y`` away from unit ``x`` until ``||x - y|| >= 2 eps`` (bisection on ``y - lam x``)."""
    target = 2 * eps
    if eps >= 1 - 1e-12:
        return -x
    dist = _norm_batch(h, x - y, space)
    out = y.copy()
    need = dist < target
    if not np.any(need):
        return out
    xs, ys = x[need], y[need]
    lo = np.zeros(xs.shape[0])
    hi = np.full(xs.shape[0], 1.0)
    bshape = (-1,) + (1,) * (xs.ndim - 1)
    # grow hi until feasible
    for _ in range(60):
        cand = _unit(h, ys - hi.reshape(bshape) * xs, space)
        ok = _norm_batch(h, xs - cand, space) >= target
        if np.all(ok):
            break
        hi = np.where(ok, hi, hi * 2)
    for _ in range(50):
        mid = (lo + hi) / 2
        cand = _unit(h, ys - mid.reshape(bshape) * xs, space)
        ok = _norm_batch(h, xs - cand, space) >= target
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    res = _unit(h, ys - hi.reshape(bshape) * xs, space)
    # antipodal fallback when bisection cannot reach the constraint
    bad = _norm_batch(h, xs - res, space) < target
    res[bad] = -xs[bad]
    out[need] = res
    return out


def estimate_modulus(h: HypergraphPair | str, kind: str, grid, cfg: TrialConfig, *, climb_top: int = 3,
                     sweeps: int = 30) -> ModulusEstimate:
    """One-sided estimates of the modulus of smoothness (lower) or convexity (upper).

    Unit vectors are Gaussian samples normalised by ``||.||_H`` on the uniform
    probability space of size ``cfg.omega_size``; the best samples are refined
    by coordinate ascent.  Passing ``"l2"`` returns the closed form instead.
    """
    grid = [float(v) for v in grid]
    if kind not in ("smoothness", "convexity"):
        raise ValueError("kind must be 'smoothness' or 'convexity'")
    if isinstance(h, str):
        if h.lower() != "l2":
            raise ValueError(f"unknown analytic space {h!r}")
        vals = analytic_l2_modulus(kind, grid)
        return ModulusEstimate(kind, grid, vals, "exact", 0, cfg.seed, vals)
    n = cfg.omega_size
    space = DiscreteMeasureSpace.uniform(n)
    shape = (n,) * h.k
    d = int(np.prod(shape))
    raw = []
    for gi, par in enumerate(grid):
        rng = stream(cfg.seed, 5, gi)
        x = _unit(h, sample_values(rng, (cfg.trials,) + shape, "complex", 1.0), space)
        y = _unit(h, sample_values(rng, (cfg.trials,) + shape, "complex", 1.0), space)
        if kind == "smoothness":
            def score(xs, ys, tau=par):
                return (_norm_batch(h, xs + tau * ys, space) + _norm_batch(h, xs - tau * ys, space)) / 2 - 1
        else:
            if par > 1:
                raise ValueError("convexity parameter must be <= 1")
            y = _separate(h, x, y, space, par)

            def score(xs, ys):
                return -(1 - _norm_batch(h, (xs + ys) / 2, space))
        vals = score(x, y)
        best = float(np.max(vals))
        for i in np.argsort(-vals, kind="stable")[:climb_top]:
            def project(zs, eps=par):
                xs = _unit(h, zs[:, :d].reshape((-1,) + shape), space)
                ys = _unit(h, zs[:, d:].reshape((-1,) + shape), space)
                if kind == "convexity":
                    ys = _separate(h, xs, ys, space, eps)
                return np.concatenate([xs.reshape(len(zs), d), ys.reshape(len(zs), d)], axis=1)

            def objective(zs):
                return score(zs[:, :d].reshape((-1,) + shape), zs[:, d:].reshape((-1,) + shape))

            z0 = np.concatenate([x[i].reshape(-1), y[i].reshape(-1)])
            _, v = coordinate_ascent(z0, objective, 0.25, sweeps=sweeps, project=project)
            best = max(best, v)
        raw.append(best if kind == "smoothness" else -best)
    if kind == "smoothness":
        vals = list(np.maximum.accumulate(raw))
        return ModulusEstimate(kind, grid, [float(v) for v in vals], "lower", cfg.trials, cfg.seed, raw)
    order = np.argsort(grid)
    mins = np.minimum.accumulate(np.asarray(raw)[order][::-1])[::-1]
    vals = np.empty(len(grid))
    vals[order] = mins
    return ModulusEstimate(kind, grid, [float(v) for v in vals], "upper", cfg.trials, cfg.seed, raw)


# -- embedding -------------------------------------------------------------

@dataclass
class EmbeddingReport:
    n: int
    samples: int
    max_rel_error: float
    passed: bool
    cases: list[dict]

    def to_dict(self) -> dict:
        return {"n": self.n, "samples": self.samples, "max_rel_error": self.max_rel_error,
                "passed": self.passed, "cases": self.cases}


def embedding_witness(h: HypergraphPair, n: int, *, seed: int = 0, samples: int = 10,
                      tol: float = 1e-10) -> EmbeddingReport:
    """Check ``||f_a||_H = ||a||_|H|`` for diagonal ``f_a`` on counting measure."""
    fac = factorize(h)
    if len(fac.components) != 1 or fac.isolated:
        raise ValueError("embedding needs a non-factorizable pair covering every vertex")
    size = h.size()
    space = DiscreteMeasureSpace.counting(n)
    cases = []
    worst = 0.0
    vecs = [np.eye(n)[0].astype(complex)]
    for s in range(samples):
        rng = stream(seed, 6, s)
        vecs.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    for a in vecs:
        f = diagonal_function(a, h.k, space)
        got = float(_norm_batch(h, f.values[None], space)[0])
        want = math.fsum(np.abs(a) ** size) ** (1 / size)
        rel = abs(got - want) / want
        worst = max(worst, rel)
        cases.append({"a": np.stack([a.real, a.imag], -1).tolist(), "norm": got, "lp_norm": want, "rel_error": rel})
    return EmbeddingReport(n, len(vecs), worst, worst <= tol, cases)
