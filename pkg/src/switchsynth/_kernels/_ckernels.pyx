# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled second-moment kernels.

Same contracts as ``_pykernels``; every routine here is a loop over small
dense matrices where NumPy call overhead would dominate.
"""

import numpy as np

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy


cdef inline void _congruence(const double* A, const double* M, double* out,
                             double* tmp, Py_ssize_t n) noexcept nogil:
    # out = A M A^T, all row-major n x n
    cdef Py_ssize_t i, j, k
    cdef double s
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += A[i * n + k] * M[k * n + j]
            tmp[i * n + j] = s
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += tmp[i * n + k] * A[j * n + k]
            out[i * n + j] = s


cdef inline double _trace(const double* M, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0
    for i in range(n):
        s += M[i * n + i]
    return s


def propagate_moment(M, A, Py_ssize_t steps):
    cdef const double[:, ::1] Av = np.ascontiguousarray(A, dtype=np.float64)
    buf = np.empty((2,) + np.shape(M))
    buf[0] = M
    cdef double[:, :, ::1] bv = buf
    cdef Py_ssize_t n = bv.shape[1]
    cdef double[:, ::1] tmp = np.empty((n, n))
    out = np.empty(steps + 1)
    cdef double[::1] tr = out
    cdef double* cur = &bv[0, 0, 0]
    cdef double* nxt = &bv[1, 0, 0]
    cdef double* swap
    cdef Py_ssize_t k
    with nogil:
        tr[0] = _trace(cur, n)
        for k in range(steps):
            _congruence(&Av[0, 0], cur, nxt, &tmp[0, 0], n)
            tr[k + 1] = _trace(nxt, n)
            swap = cur
            cur = nxt
            nxt = swap
    return out, buf[steps % 2].copy()


def sequence_traces(M0, modes, seq):
    cdef const double[:, :, ::1] Av = np.ascontiguousarray(modes, dtype=np.float64)
    cdef const Py_ssize_t[::1] sv = np.ascontiguousarray(seq, dtype=np.intp)
    buf = np.empty((2,) + np.shape(M0))
    buf[0] = M0
    cdef double[:, :, ::1] bv = buf
    cdef Py_ssize_t n = bv.shape[1]
    cdef Py_ssize_t K = sv.shape[0]
    cdef double[:, ::1] tmp = np.empty((n, n))
    out = np.empty(K + 1)
    cdef double[::1] tr = out
    cdef double* cur = &bv[0, 0, 0]
    cdef double* nxt = &bv[1, 0, 0]
    cdef double* swap
    cdef Py_ssize_t k
    with nogil:
        tr[0] = _trace(cur, n)
        for k in range(K):
            _congruence(&Av[sv[k], 0, 0], cur, nxt, &tmp[0, 0], n)
            tr[k + 1] = _trace(nxt, n)
            swap = cur
            cur = nxt
            nxt = swap
    return out


def horizon_costs(M, modes, Py_ssize_t T):
    cdef const double[:, ::1] Mv = np.ascontiguousarray(M, dtype=np.float64)
    cdef const double[:, :, ::1] Av = np.ascontiguousarray(modes, dtype=np.float64)
    cdef Py_ssize_t m = Av.shape[0]
    cdef Py_ssize_t n = Mv.shape[0]
    sums_arr = np.empty(m)
    end_arr = np.empty(m)
    cdef double[::1] sums = sums_arr
    cdef double[::1] end = end_arr
    cdef double[:, :, ::1] bv = np.empty((3, n, n))
    cdef double* a
    cdef double* b
    cdef double* swap
    cdef double* tmp = &bv[2, 0, 0]
    cdef double t0 = _trace(&Mv[0, 0], n)
    cdef double s, last
    cdef Py_ssize_t i, k
    with nogil:
        for i in range(m):
            a = &bv[0, 0, 0]
            b = &bv[1, 0, 0]
            memcpy(a, &Mv[0, 0], n * n * sizeof(double))
            s = t0
            last = t0
            for k in range(T):
                _congruence(&Av[i, 0, 0], a, b, tmp, n)
                last = _trace(b, n)
                s += last
                swap = a
                a = b
                b = swap
            sums[i] = s
            end[i] = last
    return sums_arr, end_arr


def exhaustive_search(M0, modes, Py_ssize_t steps):
    cdef const double[:, ::1] Mv = np.ascontiguousarray(M0, dtype=np.float64)
    cdef const double[:, :, ::1] Av = np.ascontiguousarray(modes, dtype=np.float64)
    cdef Py_ssize_t m = Av.shape[0]
    cdef Py_ssize_t n = Mv.shape[0]
    cdef Py_ssize_t nn = n * n
    cdef double t0 = _trace(&Mv[0, 0], n)
    if steps == 0:
        return float(t0), np.zeros(0, dtype=np.intp)

    best_arr = np.zeros(steps, dtype=np.intp)
    cdef Py_ssize_t[::1] best_seq = best_arr
    cdef double best = np.inf
    cdef double* stack = <double*> malloc((steps + 1) * nn * sizeof(double))
    cdef double* psum = <double*> malloc((steps + 1) * sizeof(double))
    cdef double* tmp = <double*> malloc(nn * sizeof(double))
    cdef Py_ssize_t* idx = <Py_ssize_t*> malloc(steps * sizeof(Py_ssize_t))
    if stack == NULL or psum == NULL or tmp == NULL or idx == NULL:
        free(stack); free(psum); free(tmp); free(idx)
        raise MemoryError()
    cdef Py_ssize_t d, j
    try:
        with nogil:
            memcpy(stack, &Mv[0, 0], nn * sizeof(double))
            psum[0] = t0
            d = 0
            idx[0] = 0
            # depth-first odometer; visits sequences in lexicographic order
            while d >= 0:
                if idx[d] == m:
                    d -= 1
                    if d >= 0:
                        idx[d] += 1
                    continue
                _congruence(&Av[idx[d], 0, 0], stack + d * nn, stack + (d + 1) * nn, tmp, n)
                psum[d + 1] = psum[d] + _trace(stack + (d + 1) * nn, n)
                if d + 1 == steps:
                    if psum[steps] < best:
                        best = psum[steps]
                        for j in range(steps):
                            best_seq[j] = idx[j]
                    idx[d] += 1
                else:
                    d += 1
                    idx[d] = 0
    finally:
        free(stack); free(psum); free(tmp); free(idx)
    return float(best), best_arr
