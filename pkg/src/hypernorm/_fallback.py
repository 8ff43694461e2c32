"""Pure-numpy versions of the compiled brute-force kernels.

Same signatures and block structure as ``_kernels``.  Each block is
materialised in chunks and summed exactly with ``math.fsum``, so results
agree with the compensated compiled kernel to within a few ulps.
"""

from __future__ import annotations

import math

import numpy as np

_CHUNK = 1 << 18


def _block_terms(tables, fvars, weights, nvars, first, prefix):
    """Term tensor for ``x[0] = first`` and fixed ``x[1:1+len(prefix)]``.

    Returned in lexicographic order of the remaining free variables.
    """
    n = weights.size
    fixed = {0: first}
    for j, v in enumerate(prefix, start=1):
        fixed[j] = v
    free = [j for j in range(nvars) if j not in fixed]
    pos = {v: i for i, v in enumerate(free)}
    nf = len(free)
    scalar = 1.0
    for j in fixed:
        scalar *= weights[fixed[j]]
    term = np.full((n,) * nf, scalar, dtype=complex) if nf else np.array(scalar, dtype=complex)
    for j in free:
        shape = [1] * nf
        shape[pos[j]] = n
        term = term * weights.reshape(shape)
    k = fvars.shape[1]
    for e in range(tables.shape[0]):
        t = tables[e].reshape((n,) * k)
        index = []
        axes_free = []
        for i in range(k):
            var = int(fvars[e, i])
            if var in fixed:
                index.append(fixed[var])
            else:
                index.append(slice(None))
                axes_free.append(pos[var])
        t = t[tuple(index)]
        if axes_free:
            order = np.argsort(axes_free)
            t = np.transpose(t, order)
            shape = [1] * nf
            for a in sorted(axes_free):
                shape[a] = n
            t = t.reshape(shape)
        term = term * t
    return term.reshape(-1)


def _exact_sum(vals: np.ndarray) -> complex:
    return complex(math.fsum(vals.real), math.fsum(vals.imag))


def brute_force_partials(tables, fvars, weights, nvars, firsts):
    tables = np.ascontiguousarray(tables, dtype=complex)
    fvars = np.ascontiguousarray(fvars, dtype=np.intp)
    weights = np.ascontiguousarray(weights, dtype=float)
    n = weights.size
    # how many leading free variables to pin so each chunk stays small
    rest = nvars - 1
    npin = 0
    while rest - npin > 0 and n ** (rest - npin) > _CHUNK:
        npin += 1
    out = np.empty(len(firsts), dtype=complex)
    for b, first in enumerate(firsts):
        re, im = [], []
        for prefix in np.ndindex(*((n,) * npin)):
            s = _block_terms(tables, fvars, weights, nvars, int(first), prefix)
            re.append(math.fsum(s.real))
            im.append(math.fsum(s.imag))
        out[b] = complex(math.fsum(re), math.fsum(im))
    return out


def brute_force_partials_batch(tables, fvars, weights, nvars):
    tables = np.ascontiguousarray(tables, dtype=complex)
    n = np.asarray(weights).size
    out = np.empty((tables.shape[0], n), dtype=complex)
    firsts = np.arange(n)
    for b in range(tables.shape[0]):
        out[b] = brute_force_partials(tables[b], fvars, weights, nvars, firsts)
    return out
