"""Evaluation of ``int f^H`` over finite product measure spaces.

The integral runs over one copy of ``Omega`` per vertex of the grid: a
variable is a pair ``(axis i, vertex v)`` and is numbered
``sum(dims[:i]) + v``.  Each support entry ``omega`` contributes the factor
``power(f(x[var(0, omega_0)], ..., x[var(k-1, omega_{k-1})]), alpha, beta)``
and every variable carries the point masses of the space.

Two evaluation routes are provided and checked against each other:

* brute force, an odometer over every assignment (compiled kernel when the
  extension is built), compensated summation in lexicographic order;
* a planned contraction, greedy min-fill variable elimination executed with
  broadcasting products and axis sums.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import accumulate
from typing import Sequence

import numpy as np

from . import _backend
from .measure import DiscreteMeasureSpace, GridFunction
from .pair import DimensionMismatch, HypergraphPair, Omega

#: Imaginary-part threshold (relative) above which a norm is flagged.
PHASE_TOL = 1e-9
DEFAULT_TERMS = 10 ** 8
DEFAULT_BYTES = 256 * 2 ** 20
# auto mode switches from brute force to the planned route above this many terms
BRUTE_AUTO_TERMS = 1 << 15 if _backend.COMPILED else 1 << 12


class BudgetExceeded(RuntimeError):
    """Raised when an evaluation would exceed the term or memory budget."""

    def __init__(self, message: str, cost: int, limit: int, plan: "ContractionPlan | None" = None):
        super().__init__(f"{message} (cost {cost}, limit {limit})")
        self.cost = cost
        self.limit = limit
        self.plan = plan


@dataclass(frozen=True)
class Budget:
    terms: int = DEFAULT_TERMS
    bytes: int = DEFAULT_BYTES

    @classmethod
    def from_env(cls) -> "Budget":
        """Parse ``HYPERNORM_BUDGET="terms[,bytes]"``; unset means defaults."""
        raw = os.environ.get("HYPERNORM_BUDGET", "").strip()
        if not raw:
            return cls()
        parts = [p.strip() for p in raw.split(",")]
        try:
            terms = int(float(parts[0]))
            nbytes = int(float(parts[1])) if len(parts) > 1 and parts[1] else DEFAULT_BYTES
        except ValueError as exc:
            raise ValueError(f"bad HYPERNORM_BUDGET value {raw!r}") from exc
        return cls(terms, nbytes)


def _budget(budget: Budget | None) -> Budget:
    return budget if budget is not None else Budget.from_env()


# -- power kernel ----------------------------------------------------------

def _as_int(x: float) -> int | None:
    r = round(x)
    return int(r) if abs(x - r) <= 1e-12 else None


def power_table(values, a: float, b: float) -> np.ndarray:
    """Elementwise ``|z|^(a+b) exp(i (a-b) Arg z)`` with ``0^0 = 1``."""
    if a < 0 or b < 0:
        raise ValueError(f"exponents must be >= 0, got ({a}, {b})")
    z = np.asarray(values, dtype=complex)
    if a == 0 and b == 0:
        return np.ones(z.shape, dtype=complex)
    if a == b:
        return (np.abs(z) ** (2.0 * a)).astype(complex)
    ai, bi = _as_int(a), _as_int(b)
    if ai is not None and bi is not None:
        # exact integer route: z^a conj(z)^b
        out = z ** ai if ai else np.ones(z.shape, dtype=complex)
        if bi:
            out = out * np.conj(z) ** bi
        return out
    mod = np.abs(z) ** (a + b)
    return mod * np.exp(1j * (a - b) * np.angle(z))


def power_kernel(z: complex, a: float, b: float) -> complex:
    return complex(power_table(np.array(z, dtype=complex), a, b))


# -- factor assembly -------------------------------------------------------

def _offsets(dims: Sequence[int]) -> tuple[int, ...]:
    return tuple(accumulate((0,) + tuple(dims[:-1])))


def _entry_vars(dims, omega: Omega) -> tuple[int, ...]:
    off = _offsets(dims)
    return tuple(off[i] + c for i, c in enumerate(omega))


def _check_pair(h: HypergraphPair, k: int):
    if not h.is_nonnegative:
        raise ValueError("pair has negative weights; norm evaluation needs alpha, beta >= 0")
    if h.k != k:
        raise DimensionMismatch(f"pair has k={h.k} but function has k={k}")


def _tables(parts, k: int) -> dict[Omega, np.ndarray]:
    """Multiply together the power tables of all parts, keyed by omega."""
    out: dict[Omega, np.ndarray] = {}
    dims = None
    for h, values in parts:
        _check_pair(h, k)
        if dims is None:
            dims = h.dims
        elif h.dims != dims:
            raise DimensionMismatch(f"parts live on different grids {dims} and {h.dims}")
        for omega, a, b in h.entries():
            t = power_table(values, a, b)
            out[omega] = out[omega] * t if omega in out else t
    return out


# -- brute force -----------------------------------------------------------

def _brute(dims, tables: dict, weights: np.ndarray, threads: int, budget: Budget,
           batch: int | None = None, kernels=None) -> np.ndarray | complex:
    kernels = kernels or _backend.kernels
    n = weights.size
    nvars = sum(dims)
    k = len(dims)
    terms = n ** nvars * (batch or 1)
    if terms > budget.terms:
        raise BudgetExceeded("brute-force term count over budget", terms, budget.terms)
    omegas = sorted(tables)
    fvars = np.array([_entry_vars(dims, o) for o in omegas], dtype=np.intp).reshape(len(omegas), k)
    if batch is None:
        tabs = (np.stack([tables[o].reshape(-1) for o in omegas])
                if omegas else np.zeros((0, n ** k), dtype=complex))
        firsts = np.arange(n)
        if threads > 1 and n > 1:
            chunks = [c for c in np.array_split(firsts, min(threads, n)) if c.size]
            with ThreadPoolExecutor(len(chunks)) as pool:
                res = list(pool.map(lambda c: kernels.brute_force_partials(tabs, fvars, weights, nvars, c), chunks))
            partials = np.concatenate(res)
        else:
            partials = kernels.brute_force_partials(tabs, fvars, weights, nvars, firsts)
        return complex(math.fsum(partials.real), math.fsum(partials.imag))
    tabs = (np.stack([tables[o].reshape(batch, -1) for o in omegas], axis=1)
            if omegas else np.zeros((batch, 0, n ** k), dtype=complex))
    partials = kernels.brute_force_partials_batch(tabs, fvars, weights, nvars)
    return partials.sum(axis=1)


# -- planned contraction ---------------------------------------------------

@dataclass(frozen=True)
class PlanStep:
    var: int
    joint: tuple[int, ...]
    eliminated: tuple[int, ...]
    out: tuple[int, ...]


@dataclass(frozen=True)
class ContractionPlan:
    """Greedy min-fill elimination order for one support pattern."""

    dims: tuple[int, ...]
    n: int
    support: tuple[Omega, ...]
    steps: tuple[PlanStep, ...]
    cost: int
    peak_bytes: int
    pair: HypergraphPair | None = field(default=None, compare=False)

    @property
    def nvars(self) -> int:
        return sum(self.dims)

    @property
    def order(self) -> tuple[int, ...]:
        return tuple(s.var for s in self.steps)

    @property
    def brute_cost(self) -> int:
        return self.n ** self.nvars

    def variable_name(self, var: int) -> tuple[int, int]:
        off = _offsets(self.dims)
        i = max(j for j in range(len(off)) if off[j] <= var)
        return (i, var - off[i])

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "n": self.n,
            "cost": self.cost,
            "brute_cost": self.brute_cost,
            "peak_bytes": self.peak_bytes,
            "steps": [
                {
                    "var": list(self.variable_name(s.var)),
                    "joint": [list(self.variable_name(u)) for u in s.joint],
                    "eliminated": [list(self.variable_name(u)) for u in s.eliminated],
                    "intermediate_shape": [self.n] * len(s.out),
                }
                for s in self.steps
            ],
        }


def _simulate(factors: list[frozenset], alive: set[int], n: int):
    """Greedy min-fill.  Returns the steps and the summed ``n^|joint|`` cost."""
    factors = list(factors)
    steps = []
    cost = 0
    peak = 1
    while alive:
        best = None
        for v in sorted(alive):
            nb = set().union(*[f for f in factors if v in f]) - {v}
            fill = 0
            nbl = sorted(nb)
            for x in range(len(nbl)):
                for y in range(x + 1, len(nbl)):
                    a, b = nbl[x], nbl[y]
                    if not any(a in f and b in f for f in factors):
                        fill += 1
            key = (fill, len(nb), v)
            if best is None or key < best:
                best = key
        v = best[2]
        joint = frozenset().union(*[f for f in factors if v in f])
        rest = [f for f in factors if not f <= joint]
        still = frozenset().union(*rest) if rest else frozenset()
        elim = joint - still
        out = joint - elim
        steps.append(PlanStep(v, tuple(sorted(joint)), tuple(sorted(elim)), tuple(sorted(out))))
        cost += n ** len(joint)
        peak = max(peak, n ** len(joint))
        factors = rest + [out]
        alive -= elim
    return steps, cost, peak


@lru_cache(maxsize=512)
def _cached_plan(dims: tuple[int, ...], support: tuple[Omega, ...], n: int):
    nvars = sum(dims)
    factors = [frozenset(_entry_vars(dims, o)) for o in support]
    factors += [frozenset((v,)) for v in range(nvars)]
    return _simulate(factors, set(range(nvars)), n)


def plan(h: HypergraphPair, space: DiscreteMeasureSpace | int, budget: Budget | None = None,
         *, support: Sequence[Omega] | None = None) -> ContractionPlan:
    """Build (and budget-check) a contraction plan for ``h`` on ``space``."""
    budget = _budget(budget)
    n = space if isinstance(space, int) else space.n
    sup = tuple(sorted(support)) if support is not None else h.support
    steps, cost, peak = _cached_plan(h.dims, sup, n)
    p = ContractionPlan(h.dims, n, sup, tuple(steps), cost, peak * 16, h)
    if p.peak_bytes > budget.bytes:
        raise BudgetExceeded("planned intermediate memory over budget", p.peak_bytes, budget.bytes, p)
    if p.cost > budget.terms:
        raise BudgetExceeded("planned contraction cost over budget", p.cost, budget.terms, p)
    return p


def _eliminate(factors: list[tuple[tuple[int, ...], np.ndarray]], order: Sequence[int], batched: bool):
    """Execute an elimination order.  Arrays carry axes in ascending variable order."""
    lead = 1 if batched else 0
    alive = set().union(*[set(v) for v, _ in factors])
    for v in order:
        if v not in alive:
            continue
        joint = sorted(set().union(*[set(vs) for vs, _ in factors if v in vs]))
        jset = set(joint)
        consumed = [(vs, a) for vs, a in factors if set(vs) <= jset]
        rest = [(vs, a) for vs, a in factors if not set(vs) <= jset]
        still = set().union(*[set(vs) for vs, _ in rest]) if rest else set()
        elim = [u for u in joint if u not in still]
        prod = None
        for vs, a in consumed:
            shape = list(a.shape[:lead]) + [a.shape[lead + vs.index(u)] if u in vs else 1 for u in joint]
            a = a.reshape(shape)
            prod = a if prod is None else prod * a
        out_vars = tuple(u for u in joint if u not in elim)
        axes = tuple(lead + joint.index(u) for u in elim)
        res = prod.sum(axis=axes) if axes else prod
        factors = rest + [(out_vars, res)]
        alive -= set(elim)
    total = None
    for vs, a in factors:
        total = a if total is None else total * a
    return total


def _weight_factors(nvars: int, weights: np.ndarray, batch: int | None):
    w = weights.astype(complex)
    if batch is None:
        return [((v,), w) for v in range(nvars)]
    wb = np.broadcast_to(w, (batch, w.size))
    return [((v,), wb) for v in range(nvars)]


def _planned(dims, tables: dict, weights: np.ndarray, p: ContractionPlan, threads: int,
             batch: int | None = None):
    nvars = sum(dims)
    n = weights.size
    facs = [(_entry_vars(dims, o), tables[o] if batch is None else tables[o].reshape((batch,) + (n,) * len(dims)))
            for o in sorted(tables)]
    facs += _weight_factors(nvars, weights, batch)
    batched = batch is not None
    if threads <= 1 or n == 1 or not p.steps:
        return _finish(_eliminate(facs, p.order, batched), batched)
    # slice the outermost eliminated variable; partials summed in fixed order
    s = p.steps[-1].var
    lead = 1 if batched else 0

    def run(u: int):
        sliced = []
        for vs, a in facs:
            if s in vs:
                idx = [slice(None)] * a.ndim
                idx[lead + vs.index(s)] = u
                sliced.append((tuple(x for x in vs if x != s), a[tuple(idx)]))
            else:
                sliced.append((vs, a))
        order = [v for v in p.order if v != s] + [v for v in range(nvars) if v not in p.order and v != s]
        return _finish(_eliminate(sliced, order, batched), batched)

    with ThreadPoolExecutor(min(threads, n)) as pool:
        parts = list(pool.map(run, range(n)))
    if batched:
        return np.sum(np.stack(parts), axis=0)
    return complex(math.fsum(z.real for z in parts), math.fsum(z.imag for z in parts))


def _finish(total, batched: bool):
    if batched:
        return np.asarray(total, dtype=complex).reshape(-1)
    return complex(np.asarray(total).reshape(()))


# -- public integration API ------------------------------------------------

def _space_of(functions: Sequence[GridFunction]) -> DiscreteMeasureSpace:
    space = functions[0].space
    k = functions[0].k
    for f in functions[1:]:
        if f.space != space or f.k != k:
            raise DimensionMismatch("all functions must share one measure space and k")
    return space


def _dispatch(dims, tables, space: DiscreteMeasureSpace, method: str, threads: int,
              budget: Budget | None, batch: int | None = None):
    budget = _budget(budget)
    weights = np.asarray(space.weights, dtype=float)
    n = space.n
    nvars = sum(dims)
    if method not in ("auto", "brute", "planned"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "brute" if n ** nvars * (batch or 1) <= BRUTE_AUTO_TERMS else "planned"
    if method == "brute":
        return _brute(dims, tables, weights, threads, budget, batch)
    sup = tuple(sorted(tables))
    p = plan(HypergraphPair.zero(dims), n, budget, support=sup)
    if batch and p.peak_bytes * batch > budget.bytes:
        raise BudgetExceeded("batched intermediate memory over budget", p.peak_bytes * batch, budget.bytes, p)
    return _planned(dims, tables, weights, p, threads, batch)


def integrate(h: HypergraphPair, f: GridFunction, *, method: str = "auto", threads: int = 1,
              budget: Budget | None = None) -> complex:
    """``int f^H``, summed over all assignments of the grid variables."""
    return integrate_mixed([(h, f)], method=method, threads=threads, budget=budget)


def integrate_mixed(parts: Sequence[tuple[HypergraphPair, GridFunction]], *, method: str = "auto",
                    threads: int = 1, budget: Budget | None = None) -> complex:
    """``int f_1^{H_1} ... f_m^{H_m}`` for pairs on a common grid."""
    if not parts:
        raise ValueError("need at least one (pair, function) part")
    space = _space_of([f for _, f in parts])
    k = parts[0][1].k
    tables = _tables([(h, f.values) for h, f in parts], k)
    return _dispatch(parts[0][0].dims, tables, space, method, threads, budget)


def integrate_batch(h: HypergraphPair, values: np.ndarray, space: DiscreteMeasureSpace, *,
                    method: str = "auto", budget: Budget | None = None) -> np.ndarray:
    """Vectorised :func:`integrate` over ``values`` of shape ``(B,) + (n,)*k``."""
    return integrate_mixed_batch([(h, values)], space, method=method, budget=budget)


def integrate_mixed_batch(parts: Sequence[tuple[HypergraphPair, np.ndarray]], space: DiscreteMeasureSpace, *,
                          method: str = "auto", budget: Budget | None = None) -> np.ndarray:
    if not parts:
        raise ValueError("need at least one (pair, values) part")
    arrs = [np.asarray(v, dtype=complex) for _, v in parts]
    shape = arrs[0].shape
    k = len(shape) - 1
    if k < 1 or any(a.shape != shape for a in arrs) or any(s != space.n for s in shape[1:]):
        raise DimensionMismatch(f"batched values must all have shape (B,)+(n,)*k, got {[a.shape for a in arrs]}")
    tables = _tables([(h, a) for (h, _), a in zip(parts, arrs)], k)
    return _dispatch(parts[0][0].dims, tables, space, method, 1, budget, batch=shape[0])


def integrate_planned(p: ContractionPlan, f: GridFunction, *, threads: int = 1) -> complex:
    if p.pair is None:
        raise ValueError("plan was built without a pair")
    if f.n != p.n:
        raise DimensionMismatch(f"plan is for n={p.n}, function has n={f.n}")
    tables = _tables([(p.pair, f.values)], f.k)
    if tuple(sorted(tables)) != p.support:
        raise ValueError("plan support does not match its pair")
    return _planned(p.dims, tables, np.asarray(f.space.weights, dtype=float), p, threads)


# -- norms -----------------------------------------------------------------

@dataclass(frozen=True)
class NormReport:
    value: float
    integral: complex
    phase: float
    #: True when the integral is not (numerically) a nonnegative real
    flagged: bool

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "integral": [self.integral.real, self.integral.imag],
            "phase": self.phase,
            "flagged": self.flagged,
        }


def norm_from_integral(integral: complex, size: float) -> NormReport:
    mag = abs(integral)
    phase = cmath.phase(integral) if mag > 0 else 0.0
    flagged = abs(integral.imag) > PHASE_TOL * mag or integral.real < -PHASE_TOL * mag
    return NormReport(mag ** (1.0 / size), integral, phase, bool(flagged))


def norm_report(h: HypergraphPair, f: GridFunction, **kw) -> NormReport:
    size = h.size()
    if size <= 0:
        raise ValueError("norm needs |H| > 0")
    return norm_from_integral(integrate(h, f, **kw), size)


def norm(h: HypergraphPair, f: GridFunction, **kw) -> float:
    """``|int f^H|^(1/|H|)``; see :func:`norm_report` for the phase."""
    return norm_report(h, f, **kw).value


def norm_batch(h: HypergraphPair, values: np.ndarray, space: DiscreteMeasureSpace, **kw) -> np.ndarray:
    size = h.size()
    if size <= 0:
        raise ValueError("norm needs |H| > 0")
    return np.abs(integrate_batch(h, values, space, **kw)) ** (1.0 / size)


def tensor_function(f: GridFunction, g: GridFunction) -> GridFunction:
    """``(f x g)((x_1,y_1),...,(x_k,y_k)) = f(x) g(y)``, point ``(x,y) -> x*n_g + y``."""
    if f.k != g.k:
        raise DimensionMismatch(f"k mismatch: {f.k} vs {g.k}")
    k = f.k
    outer = np.multiply.outer(f.values, g.values)
    perm = [a for i in range(k) for a in (i, k + i)]
    vals = np.transpose(outer, perm).reshape((f.n * g.n,) * k)
    return GridFunction(f.space.product(g.space), vals)
