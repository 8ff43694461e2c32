# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled brute-force summation kernels.

Both entry points enumerate every assignment ``x`` in ``range(n) ** nvars`` in
lexicographic order and accumulate

    prod_j w[x_j] * prod_e tables[e, flat(x[fvars[e]])]

with Neumaier-compensated summation.  The sum is split by the value of the
first variable; each block is returned separately so that callers can fix
the reduction tree independently of threading.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef void _block(const double complex[:, ::1] tab, const Py_ssize_t[:, ::1] fv,
                 const double[::1] w, Py_ssize_t nvars, Py_ssize_t first,
                 Py_ssize_t* x, double* out) noexcept nogil:
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t E = tab.shape[0]
    cdef Py_ssize_t k = fv.shape[1]
    cdef Py_ssize_t j, e, i, idx, t, total = 1
    cdef double tr, ti, zr, zi, tmp
    cdef double sr = 0.0, si = 0.0, cr = 0.0, ci = 0.0, y
    cdef double complex z

    for j in range(1, nvars):
        total *= n
        x[j] = 0
    x[0] = first

    for t in range(total):
        tr = 1.0
        for j in range(nvars):
            tr *= w[x[j]]
        ti = 0.0
        for e in range(E):
            idx = 0
            for i in range(k):
                idx = idx * n + x[fv[e, i]]
            z = tab[e, idx]
            zr = z.real
            zi = z.imag
            tmp = tr * zr - ti * zi
            ti = tr * zi + ti * zr
            tr = tmp
        # Neumaier compensation, real and imaginary parts separately
        y = sr + tr
        if (sr if sr >= 0 else -sr) >= (tr if tr >= 0 else -tr):
            cr += (sr - y) + tr
        else:
            cr += (tr - y) + sr
        sr = y
        y = si + ti
        if (si if si >= 0 else -si) >= (ti if ti >= 0 else -ti):
            ci += (si - y) + ti
        else:
            ci += (ti - y) + si
        si = y
        j = nvars - 1
        while j >= 1:
            x[j] += 1
            if x[j] < n:
                break
            x[j] = 0
            j -= 1
    out[0] = sr + cr
    out[1] = si + ci


def brute_force_partials(tables, fvars, weights, Py_ssize_t nvars, firsts):
    """Block sums for each value in ``firsts`` of the first variable."""
    cdef const double complex[:, ::1] tab = np.ascontiguousarray(tables, dtype=np.complex128)
    cdef const Py_ssize_t[:, ::1] fv = np.ascontiguousarray(fvars, dtype=np.intp)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t[::1] fs = np.ascontiguousarray(firsts, dtype=np.intp)
    cdef Py_ssize_t m = fs.shape[0], b
    out = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double acc[2]
    cdef Py_ssize_t* x = <Py_ssize_t*> malloc(max(nvars, 1) * sizeof(Py_ssize_t))
    if x == NULL:
        raise MemoryError()
    try:
        with nogil:
            for b in range(m):
                _block(tab, fv, w, nvars, fs[b], x, acc)
                o[b] = acc[0] + 1j * acc[1]
    finally:
        free(x)
    return out


def brute_force_partials_batch(tables, fvars, weights, Py_ssize_t nvars):
    """``tables`` has shape ``(B, E, n**k)``; returns block sums of shape ``(B, n)``."""
    cdef const double complex[:, :, ::1] tab = np.ascontiguousarray(tables, dtype=np.complex128)
    cdef const Py_ssize_t[:, ::1] fv = np.ascontiguousarray(fvars, dtype=np.intp)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t B = tab.shape[0], n = w.shape[0], bb, v
    out = np.empty((B, n), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef double acc[2]
    cdef Py_ssize_t* x = <Py_ssize_t*> malloc(max(nvars, 1) * sizeof(Py_ssize_t))
    if x == NULL:
        raise MemoryError()
    try:
        with nogil:
            for bb in range(B):
                for v in range(n):
                    _block(tab[bb], fv, w, nvars, v, x, acc)
                    o[bb, v] = acc[0] + 1j * acc[1]
    finally:
        free(x)
    return out
