# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: Gray-code local-bound enumeration and see-saw iteration."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


def local_bound_signs(double[:, ::1] M):
    """Maximize sum_j |sum_i M_ij a_i| over a in {-1,+1}^p with a_0 = +1.

    Walks the sign patterns in Gray-code order so that each step flips one
    sign and updates the q column sums in O(q).
    """
    cdef Py_ssize_t p = M.shape[0], q = M.shape[1]
    cdef Py_ssize_t i, j, flip
    cdef unsigned long long t, steps, best_code = 0, code = 0
    cdef double v, best
    cdef double[::1] s = np.empty(q)
    cdef signed char[::1] a = np.ones(p, dtype=np.int8)

    for j in range(q):
        v = 0.0
        for i in range(p):
            v += M[i, j]
        s[j] = v
    best = 0.0
    for j in range(q):
        best += fabs(s[j])

    steps = (<unsigned long long>1) << (p - 1)
    for t in range(1, steps):
        flip = 0
        while not ((t >> flip) & 1):
            flip += 1
        code ^= (<unsigned long long>1) << flip
        i = flip + 1
        if a[i] > 0:
            for j in range(q):
                s[j] -= 2.0 * M[i, j]
        else:
            for j in range(q):
                s[j] += 2.0 * M[i, j]
        a[i] = -a[i]
        if (t & 0xFFFF) == 0:
            # bound the drift of the incremental sums
            for j in range(q):
                v = 0.0
                for i in range(p):
                    v += a[i] * M[i, j]
                s[j] = v
        v = 0.0
        for j in range(q):
            v += fabs(s[j])
        if v > best:
            best = v
            best_code = code

    signs = np.ones(p, dtype=np.int8)
    for i in range(1, p):
        if (best_code >> (i - 1)) & 1:
            signs[i] = -1
    return best, signs


cdef double _objective(double[:, ::1] M, double[:, ::1] A, double[:, ::1] B) nogil:
    cdef Py_ssize_t p = M.shape[0], q = M.shape[1], n = A.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double tot = 0.0, d
    for i in range(p):
        for j in range(q):
            d = 0.0
            for k in range(n):
                d += A[i, k] * B[j, k]
            tot += M[i, j] * d
    return tot


cdef void _half_step(double[:, ::1] M, double[:, ::1] src, double[:, ::1] dst,
                     double[::1] buf, bint transpose, double zero_tol) nogil:
    # dst_r <- normalized sum_s M[s, r] src_s (transpose) or M[r, s] src_s
    cdef Py_ssize_t nr = dst.shape[0], ns = src.shape[0], n = dst.shape[1]
    cdef Py_ssize_t r, s_, k
    cdef double w, nrm
    for r in range(nr):
        for k in range(n):
            buf[k] = 0.0
        for s_ in range(ns):
            w = M[s_, r] if transpose else M[r, s_]
            if w != 0.0:
                for k in range(n):
                    buf[k] += w * src[s_, k]
        nrm = 0.0
        for k in range(n):
            nrm += buf[k] * buf[k]
        nrm = sqrt(nrm)
        if nrm >= zero_tol:
            for k in range(n):
                dst[r, k] = buf[k] / nrm


def seesaw_run(double[:, ::1] M, double[:, ::1] A, double[:, ::1] B,
               double gain_tol, Py_ssize_t max_iter, double zero_tol):
    """Alternating closed-form maximization; A and B are updated in place."""
    cdef double[::1] buf = np.empty(A.shape[1])
    cdef double[::1] hist = np.empty(max_iter + 1)
    cdef Py_ssize_t it = 0
    cdef double value, new
    cdef bint capped = True
    with nogil:
        value = _objective(M, A, B)
        hist[0] = value
        while it < max_iter:
            _half_step(M, A, B, buf, True, zero_tol)
            _half_step(M, B, A, buf, False, zero_tol)
            new = _objective(M, A, B)
            it += 1
            hist[it] = new
            if new - value < gain_tol:
                capped = False
                break
            value = new
    return np.asarray(hist[:it + 1]).copy(), bool(capped)
