# cython: language_level=3
"""Compiled element kernels: fused gather, evaluation and quadrature accumulation."""
import numpy as np
cimport cython
from cython.parallel cimport prange


cdef inline double _value(const double[:, ::1] dofs, const Py_ssize_t[:, ::1] elements,
                          Py_ssize_t e, const double[:, ::1] table, Py_ssize_t p) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t k, c, node
    for k in range(4):
        node = elements[e, k]
        for c in range(4):
            s = s + dofs[node, c] * table[4 * c + k, p]
    return s


def gather(const double[:, ::1] dofs, const Py_ssize_t[:, ::1] elements):
    cdef Py_ssize_t ne = elements.shape[0], e, k, c
    out = np.empty((ne, 16))
    cdef double[:, ::1] o = out
    for e in range(ne):
        for k in range(4):
            for c in range(4):
                o[e, 4 * c + k] = dofs[elements[e, k], c]
    return out


def evaluate(const double[:, ::1] dofs, const Py_ssize_t[:, ::1] elements,
             const double[:, ::1] table, int num_threads=0):
    cdef Py_ssize_t ne = elements.shape[0], npts = table.shape[1], e, p
    out = np.empty((ne, npts))
    cdef double[:, ::1] o = out
    if num_threads <= 0:
        num_threads = 1
    for e in prange(ne, nogil=True, schedule="static", num_threads=num_threads):
        for p in range(npts):
            o[e, p] = _value(dofs, elements, e, table, p)
    return out


cdef void _element_sums(const double[:, ::1] dofs, const Py_ssize_t[:, ::1] elements,
                        Py_ssize_t e, const double[:, :, ::1] tab, const double[::1] weights,
                        const double[:, ::1] f, bint has_f, double[:, ::1] o) noexcept nogil:
    cdef double coef[16]
    cdef double vals[6]
    cdef Py_ssize_t q, k, c, i, s
    cdef double w, acc
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    for k in range(4):
        for c in range(4):
            coef[4 * c + k] = dofs[elements[e, k], c]
    for q in range(weights.shape[0]):
        for s in range(6):
            acc = 0.0
            for i in range(16):
                acc = acc + coef[i] * tab[q, s, i]
            vals[s] = acc
        w = weights[q]
        s0 = s0 + w * vals[0] * vals[0]
        s1 = s1 + w * (vals[1] * vals[1] + vals[2] * vals[2])
        s2 = s2 + w * (vals[3] * vals[3] + 2.0 * vals[5] * vals[5] + vals[4] * vals[4])
        if has_f:
            s3 = s3 + w * f[e, q] * vals[0]
    o[e, 0] = s0
    o[e, 1] = s1
    o[e, 2] = s2
    o[e, 3] = s3


def element_integrals(const double[:, ::1] dofs, const Py_ssize_t[:, ::1] elements,
                      tables, const double[::1] weights,
                      fvals=None, int num_threads=0):
    """Per-element weighted sums of v^2, |grad v|^2, |hess v|^2 and f*v (no Jacobian)."""
    cdef Py_ssize_t ne = elements.shape[0], e
    # (6, 16, nq) -> (nq, 6, 16) so each point's slots are contiguous
    cdef const double[:, :, ::1] tab = np.ascontiguousarray(np.transpose(tables, (2, 0, 1)))
    cdef bint has_f = fvals is not None
    cdef const double[:, ::1] f = fvals if has_f else np.zeros((1, 1))
    out = np.zeros((ne, 4))
    cdef double[:, ::1] o = out
    if num_threads <= 0:
        num_threads = 1
    for e in prange(ne, nogil=True, schedule="static", num_threads=num_threads):
        _element_sums(dofs, elements, e, tab, weights, f, has_f, o)
    return out
