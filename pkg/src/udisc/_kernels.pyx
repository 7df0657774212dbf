# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled polynomial kernels; see ``_pykernels`` for the reference versions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, fabs

cnp.import_array()


cdef inline double _block_poly(const double[:] c, long v, double x, double y) noexcept nogil:
    cdef Py_ssize_t j
    cdef double s = 0.0, comp = 0.0, term, t
    for j in range(c.shape[0]):
        if c[j] == 0.0:
            continue
        term = c[j] * pow(x, <double>j) * pow(y, <double>(v - j))
        t = s + term
        if fabs(s) >= fabs(term):
            comp += (s - t) + term
        else:
            comp += (term - t) + s
        s = t
    return s + comp


def block_poly(coeffs, long v, double cos2, double sin2):
    cdef const double[:] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    return _block_poly(c, v, cos2, sin2)


def weighted_blocks(coeffs, vexp, weights, cos2, sin2):
    cdef const double[:, :] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef const long long[:] vs = np.ascontiguousarray(vexp, dtype=np.int64)
    cdef const double[:] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[:] x = np.ascontiguousarray(cos2, dtype=np.float64)
    cdef const double[:] y = np.ascontiguousarray(sin2, dtype=np.float64)
    cdef Py_ssize_t nb = c.shape[0], npts = x.shape[0], p, b
    cdef double s, comp, term, t
    out = np.empty(npts, dtype=np.float64)
    cdef double[:] o = out
    with nogil:
        for p in range(npts):
            s = 0.0
            comp = 0.0
            for b in range(nb):
                if w[b] == 0.0:
                    continue
                term = w[b] * _block_poly(c[b], vs[b], x[p], y[p])
                t = s + term
                if fabs(s) >= fabs(term):
                    comp += (s - t) + term
                else:
                    comp += (term - t) + s
                s = t
            o[p] = s + comp
    return out
