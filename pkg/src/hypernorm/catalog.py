"""Named hypergraph pairs and classical oracles for their norms."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .measure import GridFunction
from .pair import HypergraphPair, scale


class FamilyError(ValueError):
    pass


def make_lp(p: float) -> HypergraphPair:
    """``alpha = beta = p/2`` on a single vertex; the norm is the usual ``L_p`` norm."""
    p = float(p)
    if p <= 0:
        raise FamilyError(f"p must be positive, got {p}")
    if p < 1:
        warnings.warn(f"L_p with p={p} < 1 is not a norm; allowed for experiments only", stacklevel=2)
    return HypergraphPair.from_maps([1], {(0,): p / 2}, {(0,): p / 2})


def make_gowers(k: int) -> HypergraphPair:
    """``U_k`` on ``{0,1}^k``: alpha is the coordinate parity, beta its complement."""
    if k < 1:
        raise FamilyError(f"k must be >= 1, got {k}")
    alpha, beta = {}, {}
    for omega in itertools.product((0, 1), repeat=k):
        (alpha if sum(omega) % 2 else beta)[omega] = 1.0
    return HypergraphPair.from_maps([2] * k, alpha, beta)


def make_schatten(two_m: int) -> HypergraphPair:
    """Cyclic trace pattern on ``[m] x [m]``; the norm is the Schatten ``2m`` norm."""
    if two_m < 2 or two_m % 2:
        raise FamilyError(f"Schatten exponent must be an even integer >= 2, got {two_m}")
    m = two_m // 2
    alpha = {(i, i): 1.0 for i in range(m)}
    beta: dict = {}
    for i in range(m):
        o = (i, (i - 1) % m)  # i == j + 1 (mod m)
        beta[o] = beta.get(o, 0.0) + 1.0
    return HypergraphPair.from_maps([m, m], alpha, beta)


def make_complete(p: float, dims) -> HypergraphPair:
    """``alpha = beta = p`` on every point of the grid."""
    if p < 0.5:
        raise FamilyError(f"p must be >= 1/2, got {p}")
    grid = {o: float(p) for o in itertools.product(*(range(d) for d in dims))}
    return HypergraphPair.from_maps(dims, grid, grid)


def two_u2() -> HypergraphPair:
    """``2 U_2``: the squared-entries variant of the ``U_2`` pattern."""
    return scale(make_gowers(2), 2)


def sqrt2_pair() -> HypergraphPair:
    """Type-I-like pattern with unequal weights: ``sqrt(2)/2`` on the diagonal, ``1/2`` off it."""
    d, o = math.sqrt(2) / 2, 0.5
    w = {(0, 0): d, (1, 1): d, (0, 1): o, (1, 0): o}
    return HypergraphPair.from_maps([2, 2], w, w)


@dataclass(frozen=True)
class DegenerateExtension:
    """A pair built on top of a Type I base with ``k_new`` averaged axes."""

    pair: HypergraphPair
    base: HypergraphPair
    new_axes: tuple[int, ...]
    #: ``entry_index[omega]`` is the position of omega in the sorted base support
    entry_index: dict


def make_degenerate_extension(base: HypergraphPair, k_new: int) -> DegenerateExtension:
    """Append ``k_new`` axes on which the norm only sees the axis average.

    Each new axis has vertices ``(entry, i)`` for a base support entry and
    ``i in range(s)``, flattened as ``entry * s + i``.  The first ``m = s/2``
    copies carry alpha, the rest beta.
    """
    if k_new < 1:
        raise FamilyError("k_new must be >= 1")
    entries = base.entries()
    if not entries or not base.is_nonnegative:
        raise FamilyError("base must be a nonzero nonnegative pair")
    s = 2 * entries[0][1]
    for _, a, b in entries:
        if abs(a - b) > 1e-9 or abs(2 * a - s) > 1e-9:
            raise FamilyError("base must be Type I (alpha = beta = s/2 on its support)")
    if abs(s - round(s)) > 1e-9 or round(s) % 2 or round(s) < 2:
        raise FamilyError(f"base parameter s={s} is not an even integer")
    s = int(round(s))
    m = s // 2
    supp = [o for o, _, _ in entries]
    dims = list(base.dims) + [len(supp) * s] * k_new
    alpha, beta = {}, {}
    for idx, o in enumerate(supp):
        for i in range(s):
            new = o + (idx * s + i,) * k_new
            (alpha if i < m else beta)[new] = 1.0
    pair = HypergraphPair.from_maps(dims, alpha, beta)
    return DegenerateExtension(pair, base, tuple(range(base.k, base.k + k_new)),
                               {o: idx for idx, o in enumerate(supp)})


def average_axes(f: GridFunction, axes) -> GridFunction:
    """``F(x) = int f(x, y) dy`` over the listed trailing axes."""
    vals = f.values
    w = f.space.weights
    for ax in sorted(axes, reverse=True):
        vals = np.tensordot(vals, w, axes=([ax], [0]))
    return GridFunction(f.space, vals)


# -- oracles ---------------------------------------------------------------

def lp_oracle(f: GridFunction, p: float) -> float:
    """``(sum_i w_i |f_i|^p)^(1/p)`` for a one-variable function."""
    vals = np.abs(f.values.reshape(-1))
    return math.fsum(f.space.weights * vals ** p) ** (1.0 / p)


def _require_counting(f: GridFunction):
    if f.k != 2:
        raise FamilyError("Schatten oracle needs a matrix (k=2)")
    if not np.all(f.space.weights == 1.0):
        raise FamilyError("Schatten oracle requires counting measure")


def schatten_trace(a: np.ndarray, m: int) -> float:
    """``Tr((A A*)^m)`` by repeated Hermitian products."""
    a = np.asarray(a, dtype=complex)
    g = a @ a.conj().T
    p = g
    for _ in range(m - 1):
        p = p @ g
    return float(np.trace(p).real)


def schatten_oracle(f: GridFunction | np.ndarray, two_m: int) -> float:
    if isinstance(f, GridFunction):
        _require_counting(f)
        f = f.values
    m = two_m // 2
    return max(schatten_trace(f, m), 0.0) ** (1.0 / two_m)


def schatten_svd(a: np.ndarray, two_m: int) -> float:
    """Cross-check through the singular values."""
    s = np.linalg.svd(np.asarray(a, dtype=complex), compute_uv=False)
    return math.fsum(s ** two_m) ** (1.0 / two_m)


FAMILIES = {
    "lp": make_lp,
    "gowers": make_gowers,
    "schatten": make_schatten,
    "complete": make_complete,
    "two-u2": two_u2,
    "sqrt2": sqrt2_pair,
}
