"""Hypergraph pairs ``H = (alpha, beta)`` and their algebra.

A k-hypergraph pair lives on a product grid ``V_1 x ... x V_k`` with
``V_i = range(dims[i])``.  Grid points are plain tuples of ints ("omegas").
Both weight maps are stored sparsely; zero entries are never stored.

Axes are 0-based everywhere in the library.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

Omega = tuple[int, ...]

#: Entries with ``|value|`` below this are pruned after arithmetic.
PRUNE_TOL = 1e-12
#: Tolerance used when comparing weights (isomorphism, classification).
WEIGHT_TOL = 1e-9
#: Default cap on ``sum(dims)`` for exponential-time operations.
DIM_CAP = 24


class DimensionMismatch(ValueError):
    pass


def _clean(weights: Mapping[Omega, float], dims: Sequence[int]) -> tuple[tuple[Omega, float], ...]:
    out = {}
    k = len(dims)
    for omega, value in weights.items():
        omega = tuple(int(c) for c in omega)
        if len(omega) != k:
            raise ValueError(f"omega {omega} has length {len(omega)}, expected {k}")
        for c, d in zip(omega, dims):
            if not 0 <= c < d:
                raise ValueError(f"omega {omega} out of range for dims {list(dims)}")
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite weight at {omega}")
        out[omega] = out.get(omega, 0.0) + value
    return tuple(sorted((o, v) for o, v in out.items() if abs(v) >= PRUNE_TOL))


@dataclass(frozen=True)
class HypergraphPair:
    """A k-hypergraph pair over ``range(dims[0]) x ... x range(dims[k-1])``.

    Construct with :meth:`from_maps`; the raw fields hold the canonical
    (sorted, pruned) entry tuples so that equality is structural.
    """

    dims: tuple[int, ...]
    alpha_items: tuple[tuple[Omega, float], ...] = ()
    beta_items: tuple[tuple[Omega, float], ...] = ()

    def __post_init__(self):
        if len(self.dims) < 1 or any(d < 1 for d in self.dims):
            raise ValueError(f"dims must be a nonempty list of positive ints, got {self.dims}")

    @classmethod
    def from_maps(cls, dims: Sequence[int], alpha: Mapping[Omega, float] | None = None,
                  beta: Mapping[Omega, float] | None = None) -> "HypergraphPair":
        dims = tuple(int(d) for d in dims)
        if len(dims) < 1 or any(d < 1 for d in dims):
            raise ValueError(f"dims must be a nonempty list of positive ints, got {list(dims)}")
        return cls(dims, _clean(alpha or {}, dims), _clean(beta or {}, dims))

    @classmethod
    def zero(cls, dims: Sequence[int]) -> "HypergraphPair":
        return cls.from_maps(dims)

    # -- views -----------------------------------------------------------

    @property
    def k(self) -> int:
        return len(self.dims)

    @cached_property
    def alpha(self) -> dict[Omega, float]:
        return dict(self.alpha_items)

    @cached_property
    def beta(self) -> dict[Omega, float]:
        return dict(self.beta_items)

    @cached_property
    def support(self) -> tuple[Omega, ...]:
        """Sorted ``supp(alpha) | supp(beta)``."""
        return tuple(sorted(set(self.alpha) | set(self.beta)))

    def entries(self) -> list[tuple[Omega, float, float]]:
        """``(omega, alpha(omega), beta(omega))`` over the support."""
        a, b = self.alpha, self.beta
        return [(o, a.get(o, 0.0), b.get(o, 0.0)) for o in self.support]

    def size(self) -> float:
        return math.fsum(abs(v) for _, v in self.alpha_items + self.beta_items)

    @property
    def is_nonnegative(self) -> bool:
        return all(v >= 0 for _, v in self.alpha_items + self.beta_items)

    @property
    def is_integer_valued(self) -> bool:
        return all(abs(v - round(v)) <= WEIGHT_TOL for _, v in self.alpha_items + self.beta_items)

    def __repr__(self):
        return (f"HypergraphPair(dims={list(self.dims)}, alpha={self.alpha}, beta={self.beta})")

    # -- operators -------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, r):
        return scale(self, r)

    __rmul__ = __mul__

    def __truediv__(self, r):
        return scale(self, 1.0 / r)

    def conj(self) -> "HypergraphPair":
        return conjugate(self)

    # -- JSON ------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "alpha": [{"omega": list(o), "value": v} for o, v in self.alpha_items],
            "beta": [{"omega": list(o), "value": v} for o, v in self.beta_items],
            "dims": list(self.dims),
            "k": self.k,
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    @classmethod
    def from_dict(cls, data: Mapping) -> "HypergraphPair":
        try:
            if not isinstance(data["dims"], list):
                raise TypeError("dims must be a list")
            dims = [int(d) for d in data["dims"]]
            k = int(data.get("k", len(dims)))
            alpha = {tuple(e["omega"]): e["value"] for e in data.get("alpha", [])}
            beta = {tuple(e["omega"]): e["value"] for e in data.get("beta", [])}
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed pair JSON: {exc!r}") from exc
        if k != len(dims):
            raise ValueError(f"k={k} disagrees with len(dims)={len(dims)}")
        return cls.from_maps(dims, alpha, beta)

    @classmethod
    def from_json(cls, text: str) -> "HypergraphPair":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# construction and arithmetic


def delta(dims: Sequence[int], psi: Sequence[int]) -> HypergraphPair:
    """The pair ``1_psi = (delta_psi, 0)``."""
    return HypergraphPair.from_maps(dims, {tuple(psi): 1.0})


def _check_same_grid(h1: HypergraphPair, h2: HypergraphPair):
    if h1.dims != h2.dims:
        raise DimensionMismatch(f"dims differ: {list(h1.dims)} vs {list(h2.dims)}")


def _combine(m1, m2, sign):
    out = dict(m1)
    for o, v in m2.items():
        out[o] = out.get(o, 0.0) + sign * v
    return out


def add(h1: HypergraphPair, h2: HypergraphPair) -> HypergraphPair:
    _check_same_grid(h1, h2)
    return HypergraphPair.from_maps(h1.dims, _combine(h1.alpha, h2.alpha, 1.0),
                                    _combine(h1.beta, h2.beta, 1.0))


def sub(h1: HypergraphPair, h2: HypergraphPair) -> HypergraphPair:
    _check_same_grid(h1, h2)
    return HypergraphPair.from_maps(h1.dims, _combine(h1.alpha, h2.alpha, -1.0),
                                    _combine(h1.beta, h2.beta, -1.0))


def conjugate(h: HypergraphPair) -> HypergraphPair:
    return HypergraphPair(h.dims, h.beta_items, h.alpha_items)


def scale(h: HypergraphPair, r: float) -> HypergraphPair:
    r = float(r)
    return HypergraphPair.from_maps(h.dims, {o: r * v for o, v in h.alpha_items},
                                    {o: r * v for o, v in h.beta_items})


def disjoint_union(h1: HypergraphPair, h2: HypergraphPair) -> HypergraphPair:
    """Block-diagonal placement: ``h1`` on the low indices of every axis."""
    if h1.k != h2.k:
        raise DimensionMismatch(f"k differs: {h1.k} vs {h2.k}")
    dims = tuple(a + b for a, b in zip(h1.dims, h2.dims))

    def shift(o):
        return tuple(c + d for c, d in zip(o, h1.dims))

    alpha = dict(h1.alpha)
    alpha.update({shift(o): v for o, v in h2.alpha_items})
    beta = dict(h1.beta)
    beta.update({shift(o): v for o, v in h2.beta_items})
    return HypergraphPair.from_maps(dims, alpha, beta)


def tensor(h1: HypergraphPair, h2: HypergraphPair) -> HypergraphPair:
    """``(a1(x)a2 + b1(x)b2, a1(x)b2 + b1(x)a2)``; vertex ``(v, w)`` -> ``v*dims2 + w``."""
    if h1.k != h2.k:
        raise DimensionMismatch(f"k differs: {h1.k} vs {h2.k}")
    dims = tuple(a * b for a, b in zip(h1.dims, h2.dims))
    alpha: dict[Omega, float] = {}
    beta: dict[Omega, float] = {}
    for o1, a1, b1 in h1.entries():
        for o2, a2, b2 in h2.entries():
            o = tuple(v * d2 + w for v, w, d2 in zip(o1, o2, h2.dims))
            alpha[o] = a1 * a2 + b1 * b2
            beta[o] = a1 * b2 + b1 * a2
    return HypergraphPair.from_maps(dims, alpha, beta)


def project(h: HypergraphPair, axes: Iterable[int]) -> HypergraphPair:
    """Fibre-summed pair ``H_S`` on the axes ``S`` (kept in ascending order)."""
    axes = sorted(set(int(a) for a in axes))
    if not axes:
        raise ValueError("projection needs a nonempty set of axes")
    if axes[0] < 0 or axes[-1] >= h.k:
        raise ValueError(f"axes {axes} out of range for k={h.k}")
    dims = tuple(h.dims[a] for a in axes)
    alpha: dict[Omega, float] = {}
    beta: dict[Omega, float] = {}
    for o, v in h.alpha_items:
        key = tuple(o[a] for a in axes)
        alpha[key] = alpha.get(key, 0.0) + v
    for o, v in h.beta_items:
        key = tuple(o[a] for a in axes)
        beta[key] = beta.get(key, 0.0) + v
    return HypergraphPair.from_maps(dims, alpha, beta)


def restrict(h: HypergraphPair, boxes: Sequence[Sequence[int]]) -> HypergraphPair:
    """Restriction of ``h`` to the sub-box ``W_1 x ... x W_k``, relabelled to ``range(|W_i|)``."""
    maps = [{v: j for j, v in enumerate(sorted(w))} for w in boxes]

    def keep(items):
        return {tuple(m[c] for m, c in zip(maps, o)): v for o, v in items
                if all(c in m for m, c in zip(maps, o))}

    return HypergraphPair.from_maps([len(m) for m in maps], keep(h.alpha_items), keep(h.beta_items))


# ---------------------------------------------------------------------------
# isomorphism


def _wkey(x: float) -> int:
    return round(x / WEIGHT_TOL)


def _vertex_profiles(h: HypergraphPair) -> list[list[tuple]]:
    """Per axis, per vertex: sorted multiset of incident (alpha, beta) weights."""
    prof = [[[] for _ in range(d)] for d in h.dims]
    for o, a, b in h.entries():
        for i, c in enumerate(o):
            prof[i][c].append((_wkey(a), _wkey(b)))
    return [[tuple(sorted(p)) for p in axis] for axis in prof]


def find_isomorphism(h1: HypergraphPair, h2: HypergraphPair,
                     dim_cap: int = DIM_CAP) -> tuple[tuple[int, ...], ...] | None:
    """Return per-axis bijections ``h_i`` (as tuples ``h_i[v] = w``) or ``None``.

    Backtracking over vertices, pruned by per-vertex degree profiles and by
    checking every support entry as soon as all of its coordinates are fixed.
    """
    if h1.k != h2.k or h1.dims != h2.dims:
        return None
    if sum(h1.dims) > dim_cap:
        raise ValueError(f"sum(dims)={sum(h1.dims)} exceeds isomorphism cap {dim_cap}")
    if len(h1.support) != len(h2.support):
        return None
    p1, p2 = _vertex_profiles(h1), _vertex_profiles(h2)
    for a1, a2 in zip(p1, p2):
        if sorted(a1) != sorted(a2):
            return None

    k = h1.k
    e1 = h1.entries()
    w2 = {o: (_wkey(a), _wkey(b)) for o, a, b in h2.entries()}

    # Visit vertices so that entries complete early: walk the support in order.
    order: list[tuple[int, int]] = []
    seen = set()
    for o, _, _ in e1:
        for i, c in enumerate(o):
            if (i, c) not in seen:
                seen.add((i, c))
                order.append((i, c))
    for i, d in enumerate(h1.dims):
        for c in range(d):
            if (i, c) not in seen:
                seen.add((i, c))
                order.append((i, c))
    pos = {var: n for n, var in enumerate(order)}
    # entries that become fully assigned at each step
    due: list[list[tuple[Omega, tuple[int, int]]]] = [[] for _ in order]
    for o, a, b in e1:
        last = max(pos[(i, c)] for i, c in enumerate(o))
        due[last].append((o, (_wkey(a), _wkey(b))))

    maps = [[-1] * d for d in h1.dims]
    used = [[False] * d for d in h1.dims]

    def rec(step: int) -> bool:
        if step == len(order):
            return True
        i, v = order[step]
        for w in range(h1.dims[i]):
            if used[i][w] or p1[i][v] != p2[i][w]:
                continue
            maps[i][v] = w
            used[i][w] = True
            ok = True
            for o, key in due[step]:
                img = tuple(maps[j][o[j]] for j in range(k))
                if w2.get(img) != key:
                    ok = False
                    break
            if ok and rec(step + 1):
                return True
            used[i][w] = False
            maps[i][v] = -1
        return False

    if rec(0):
        return tuple(tuple(m) for m in maps)
    return None


def isomorphic(h1: HypergraphPair, h2: HypergraphPair, dim_cap: int = DIM_CAP) -> bool:
    return find_isomorphism(h1, h2, dim_cap) is not None


def apply_isomorphism(h: HypergraphPair, maps: Sequence[Sequence[int]]) -> HypergraphPair:
    """Relabel ``h`` by per-axis vertex maps."""
    def mv(o):
        return tuple(maps[i][c] for i, c in enumerate(o))

    return HypergraphPair.from_maps(h.dims, {mv(o): v for o, v in h.alpha_items},
                                    {mv(o): v for o, v in h.beta_items})


# ---------------------------------------------------------------------------
# factorization and minimality


@dataclass(frozen=True)
class Factorization:
    components: tuple[HypergraphPair, ...]
    #: ``blocks[c][i]`` lists the original vertices of axis ``i`` in component ``c``.
    blocks: tuple[tuple[tuple[int, ...], ...], ...]
    #: vertices ``(axis, v)`` not touched by any support entry
    isolated: tuple[tuple[int, int], ...] = field(default=())

    def __len__(self):
        return len(self.components)


def factorize(h: HypergraphPair) -> Factorization:
    """Split ``h`` into its linked components (union-find over vertices)."""
    offsets = list(itertools.accumulate((0,) + h.dims[:-1]))
    parent = list(range(sum(h.dims)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    touched = set()
    for o in h.support:
        ids = [offsets[i] + c for i, c in enumerate(o)]
        touched.update(ids)
        r0 = find(ids[0])
        for x in ids[1:]:
            r = find(x)
            if r != r0:
                parent[max(r, r0)] = min(r, r0)
                r0 = min(r, r0)

    groups: dict[int, list[list[int]]] = {}
    isolated = []
    for i, d in enumerate(h.dims):
        for c in range(d):
            x = offsets[i] + c
            if x not in touched:
                isolated.append((i, c))
                continue
            groups.setdefault(find(x), [[] for _ in h.dims])[i].append(c)
    roots = sorted(groups, key=lambda r: min((offsets[i] + min(b)) for i, b in enumerate(groups[r]) if b))
    comps, blocks = [], []
    for r in roots:
        box = groups[r]
        comps.append(restrict(h, box))
        blocks.append(tuple(tuple(b) for b in box))
    return Factorization(tuple(comps), tuple(blocks), tuple(isolated))


def is_minimal(h: HypergraphPair) -> tuple[bool, str]:
    """Return ``(minimal, reason)``."""
    fac = factorize(h)
    if fac.isolated:
        i, v = fac.isolated[0]
        return False, f"vertex {v} on axis {i} is not covered by the support"
    counts = component_class_counts(h)
    if counts and all(m % 2 == 0 for m in counts.values()):
        return False, "H is isomorphic to H' disjoint-union H' (every component class has even multiplicity)"
    return True, "minimal"


def component_class_counts(h: HypergraphPair) -> Counter:
    """Multiplicity of each component isomorphism class, keyed by class index."""
    fac = factorize(h)
    reps: list[HypergraphPair] = []
    counts: Counter = Counter()
    for comp in fac.components:
        for idx, rep in enumerate(reps):
            if isomorphic(rep, comp):
                counts[idx] += 1
                break
        else:
            reps.append(comp)
            counts[len(reps) - 1] += 1
    return counts
