"""Slow, independent evaluation of ``int f^H`` straight from the definition.

Kept free of the package's engine so the tests have a second route.
"""

from __future__ import annotations

import cmath
import itertools
import math


def power(z: complex, a: float, b: float) -> complex:
    """``z^a conj(z)^b`` as ``|z|^(a+b) e^(i(a-b) Arg z)`` with ``0^0 = 1``."""
    if a == 0 and b == 0:
        return 1.0 + 0j
    r = abs(z)
    if r == 0:
        return 0j
    return r ** (a + b) * cmath.exp(1j * (a - b) * cmath.phase(z))


def integral(dims, alpha: dict, beta: dict, values, weights) -> complex:
    """``values`` is a nested list or array indexed by ``k`` grid points."""
    k = len(dims)
    n = len(weights)
    support = sorted(set(alpha) | set(beta))
    total_re, total_im = [], []
    for xs in itertools.product(*[itertools.product(range(n), repeat=d) for d in dims]):
        w = 1.0
        for axis in xs:
            for p in axis:
                w *= weights[p]
        term = complex(w)
        for o in support:
            point = tuple(xs[i][o[i]] for i in range(k))
            z = complex(values[point] if hasattr(values, "shape") else _get(values, point))
            term *= power(z, alpha.get(o, 0.0), beta.get(o, 0.0))
        total_re.append(term.real)
        total_im.append(term.imag)
    return complex(math.fsum(total_re), math.fsum(total_im))


def _get(values, point):
    for c in point:
        values = values[c]
    return values


def norm(dims, alpha, beta, values, weights) -> float:
    size = sum(alpha.values()) + sum(beta.values())
    return abs(integral(dims, alpha, beta, values, weights)) ** (1.0 / size)
