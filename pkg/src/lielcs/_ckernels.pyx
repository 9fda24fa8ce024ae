# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled fixed-step RK4 kernels for the chart integrators.

Both kernels advance a batch of states in place through ``nsteps`` steps
of size ``h`` with a control that is constant over the call.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef inline void _ad_apply(const double *y, const double *v, const double[:, :, ::1] C,
                           int d, double *out) noexcept nogil:
    cdef int i, j, k
    cdef double s
    for k in range(d):
        out[k] = 0.0
    for i in range(d):
        if y[i] == 0.0:
            continue
        for j in range(d):
            s = y[i] * v[j]
            if s == 0.0:
                continue
            for k in range(d):
                out[k] += s * C[i, j, k]


cdef inline void _exp_field(const double *y, const double *u, const double[:, ::1] D,
                            const double[:, :, ::1] C, const double[::1] coeffs, int d,
                            double *tmp, double *tmp2, double *out) noexcept nogil:
    cdef int i, j, k
    cdef int K = coeffs.shape[0]
    cdef double s
    for i in range(d):
        s = 0.0
        for j in range(d):
            s += D[i, j] * y[j]
        out[i] = s + coeffs[0] * u[i]
        tmp[i] = u[i]
    for k in range(1, K):
        _ad_apply(y, tmp, C, d, tmp2)
        for i in range(d):
            tmp[i] = tmp2[i]
            out[i] += coeffs[k] * tmp2[i]


def rk4_exp_coords(double[:, ::1] Y, const double[:, ::1] U, const double[:, ::1] D,
                   const double[:, :, ::1] C, const double[::1] coeffs, double h, long nsteps):
    """Exponential-coordinate field ``DY + sum_k coeffs[k] ad_Y^k U``."""
    cdef int B = Y.shape[0]
    cdef int d = Y.shape[1]
    cdef int b, i
    cdef long step
    cdef double *w = <double *> malloc(8 * d * sizeof(double))
    if w == NULL:
        raise MemoryError()
    cdef double *k1 = w
    cdef double *k2 = w + d
    cdef double *k3 = w + 2 * d
    cdef double *k4 = w + 3 * d
    cdef double *ys = w + 4 * d
    cdef double *t1 = w + 5 * d
    cdef double *t2 = w + 6 * d
    cdef double *y
    cdef double hh = 0.5 * h
    cdef double h6 = h / 6.0
    try:
        with nogil:
            for b in range(B):
                y = &Y[b, 0]
                for step in range(nsteps):
                    _exp_field(y, &U[b, 0], D, C, coeffs, d, t1, t2, k1)
                    for i in range(d):
                        ys[i] = y[i] + hh * k1[i]
                    _exp_field(ys, &U[b, 0], D, C, coeffs, d, t1, t2, k2)
                    for i in range(d):
                        ys[i] = y[i] + hh * k2[i]
                    _exp_field(ys, &U[b, 0], D, C, coeffs, d, t1, t2, k3)
                    for i in range(d):
                        ys[i] = y[i] + h * k3[i]
                    _exp_field(ys, &U[b, 0], D, C, coeffs, d, t1, t2, k4)
                    for i in range(d):
                        y[i] += h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    finally:
        free(w)


cdef inline void _sd_field(const double *x, const double *z, const double *wv,
                           const double[:, ::1] Dv, const double[:, :, ::1] A,
                           int n, int k, double *out) noexcept nogil:
    cdef int i, j, l
    cdef double s
    for i in range(n):
        s = z[i]
        for j in range(n):
            s += Dv[i, j] * x[j]
        for l in range(k):
            if wv[l] != 0.0:
                for j in range(n):
                    s += wv[l] * A[l, i, j] * x[j]
        out[i] = s
    for l in range(k):
        out[n + l] = wv[l]


def rk4_semidirect(double[:, ::1] X, const double[:, ::1] Z, const double[:, ::1] W,
                   const double[:, ::1] Dv, const double[:, :, ::1] A, double h, long nsteps):
    """Semidirect chart field ``v' = Dv v + z + sum_l w_l A_l v``, ``theta' = w``."""
    cdef int B = X.shape[0]
    cdef int d = X.shape[1]
    cdef int n = Dv.shape[0]
    cdef int k = d - n
    cdef int b, i
    cdef long step
    cdef double *w = <double *> malloc(5 * d * sizeof(double))
    if w == NULL:
        raise MemoryError()
    cdef double *k1 = w
    cdef double *k2 = w + d
    cdef double *k3 = w + 2 * d
    cdef double *k4 = w + 3 * d
    cdef double *xs = w + 4 * d
    cdef double *x
    cdef double hh = 0.5 * h
    cdef double h6 = h / 6.0
    try:
        with nogil:
            for b in range(B):
                x = &X[b, 0]
                for step in range(nsteps):
                    _sd_field(x, &Z[b, 0], &W[b, 0], Dv, A, n, k, k1)
                    for i in range(d):
                        xs[i] = x[i] + hh * k1[i]
                    _sd_field(xs, &Z[b, 0], &W[b, 0], Dv, A, n, k, k2)
                    for i in range(d):
                        xs[i] = x[i] + hh * k2[i]
                    _sd_field(xs, &Z[b, 0], &W[b, 0], Dv, A, n, k, k3)
                    for i in range(d):
                        xs[i] = x[i] + h * k3[i]
                    _sd_field(xs, &Z[b, 0], &W[b, 0], Dv, A, n, k, k4)
                    for i in range(d):
                        x[i] += h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    finally:
        free(w)
