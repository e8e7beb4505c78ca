# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Hartree screening potentials; same contract as ``yk_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow

cnp.import_array()


cdef void _one(const double[::1] rho, int k, const double[::1] r, const double[::1] w,
               const cnp.intp_t[:, ::1] idx, const double[:, ::1] wts,
               double[::1] out, double[:, ::1] tmp) noexcept nogil:
    cdef Py_ssize_t n = r.shape[0], m = wts.shape[1], i, j, q, t
    cdef double s1, s2, acc1, acc2, x
    cdef double[::1] up = tmp[0]      # r^{k+1}
    cdef double[::1] dn = tmp[1]      # r^{-k}
    cdef double[::1] a = tmp[2]
    cdef double[::1] b = tmp[3]
    cdef double[::1] lt = tmp[4]
    cdef double[::1] ut = tmp[5]
    cdef double[::1] c = tmp[6]
    for i in range(n):
        x = pow(r[i], k)
        up[i] = x * r[i]
        dn[i] = 1.0 / x
        a[i] = up[i] * rho[i]
        b[i] = dn[i] * rho[i]
        c[i] = 0.0
    # forward: below_i = sum_{j<i} I_j[a], above_i = sum_{j>=i} I_j[b]
    acc1 = 0.0
    out[0] = 0.0
    for i in range(n - 1):
        s1 = 0.0
        for q in range(m):
            s1 = s1 + wts[i, q] * a[idx[i, q]]
        acc1 = acc1 + s1
        out[i + 1] = acc1 / up[i + 1]
    acc2 = 0.0
    for j in range(n - 1):
        i = n - 2 - j
        s2 = 0.0
        for q in range(m):
            s2 = s2 + wts[i, q] * b[idx[i, q]]
        acc2 = acc2 + s2
        out[i] = out[i] + acc2 / dn[i]
    # adjoint on w*rho: lt_i = sum_{j>i} w rho_j / r_j^{k+1}, ut_i = sum_{j<=i} w rho_j r_j^k
    acc1 = 0.0
    for j in range(n - 1):
        i = n - 2 - j
        acc1 = acc1 + w[i + 1] * rho[i + 1] / up[i + 1]
        lt[i] = acc1
    acc2 = 0.0
    for i in range(n - 1):
        acc2 = acc2 + w[i] * rho[i] / dn[i]
        ut[i] = acc2
    for i in range(n - 1):
        for q in range(m):
            t = idx[i, q]
            c[t] = c[t] + wts[i, q] * (lt[i] * up[t] + ut[i] * dn[t])
    for i in range(n):
        out[i] = 0.5 * (out[i] + c[i] / w[i])


def yk_sym_batch(rho, ks, r, w, idx, wts):
    cdef const double[:, ::1] rv = np.ascontiguousarray(np.atleast_2d(rho), dtype=np.float64)
    cdef Py_ssize_t nb = rv.shape[0], n = rv.shape[1], i
    cdef const cnp.intp_t[::1] kv = np.ascontiguousarray(ks, dtype=np.intp)
    cdef const double[::1] rr = np.ascontiguousarray(r, dtype=np.float64)
    cdef const double[::1] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef const cnp.intp_t[:, ::1] iv = np.ascontiguousarray(idx, dtype=np.intp)
    cdef const double[:, ::1] wv = np.ascontiguousarray(wts, dtype=np.float64)
    out = np.empty((nb, n))
    cdef double[:, ::1] ov = out
    cdef double[:, ::1] tmp = np.empty((7, n))
    with nogil:
        for i in range(nb):
            _one(rv[i], <int>kv[i], rr, ww, iv, wv, ov[i], tmp)
    return out
