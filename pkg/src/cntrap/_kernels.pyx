# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled shell integrand kernel (same contract as ``_kernels_py``).

Per node only six scaled Bessel evaluations are made; all other orders come
from three-term recurrences (upward for K, downward for I, both stable).
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, pow
from libc.stdlib cimport malloc, free
from scipy.special.cython_special cimport ive, kve

cnp.import_array()

cdef double _BIG = 1e280
cdef double _TINY = 1e-250


cdef void _k_upward(double x, int top, double* kv) noexcept nogil:
    # kv[0..top] = kve(n, x)
    cdef int n
    kv[0] = kve(0.0, x)
    if top >= 1:
        kv[1] = kve(1.0, x)
    for n in range(1, top):
        kv[n + 1] = kv[n - 1] + (2.0 * n / x) * kv[n]


cdef void _i_downward(double x, int lo, int hi, double* iv) noexcept nogil:
    # iv[j] = ive(lo + j, x) for j = 0..hi-lo
    cdef int n, j
    cdef int span = hi - lo
    iv[span] = ive(<double> hi, x)
    if span == 0:
        return
    iv[span - 1] = ive(<double> (hi - 1), x)
    if iv[span] < _TINY:
        for j in range(span - 1):
            iv[j] = ive(<double> (lo + j), x)
        return
    for n in range(hi - 1, lo, -1):
        j = n - lo
        iv[j - 1] = iv[j + 1] + (2.0 * n / x) * iv[j]


def shell_blocks(kappa, int n0, int n1, double R, double r,
                 double complex beta, double complex gamma):
    cdef double[::1] kap = np.ascontiguousarray(kappa, dtype=np.float64)
    cdef Py_ssize_t m = kap.shape[0]
    cdef int nn = n1 - n0
    out_arr = np.empty((m, nn, 3), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_arr
    cdef Py_ssize_t i
    cdef int j, n
    cdef double k, xR, xr, damp, iR, kR, kr, kpr, p2, p2d, ikR, k2, w, ratio, dn
    cdef double complex common
    cdef double* kvr = <double*> malloc((n1 + 2) * sizeof(double))
    cdef double* kvR = <double*> malloc((n1 + 2) * sizeof(double))
    cdef double* ivR = <double*> malloc((nn + 1) * sizeof(double))
    try:
        for i in range(m):
            k = kap[i]
            xR = k * R
            xr = k * r
            damp = exp(-2.0 * k * (r - R))
            k2 = k * k
            _k_upward(xr, n1, kvr)
            _k_upward(xR, n1, kvR)
            _i_downward(xR, n0, n1, ivR)
            for j in range(nn):
                n = n0 + j
                dn = <double> n
                iR = ivR[j]
                kR = kvR[n]
                kr = kvr[n]
                if n == 0:
                    kpr = -kvr[1]
                else:
                    kpr = -0.5 * (kvr[n - 1] + kvr[n + 1])
                if n > 0 and not (iR > _TINY and fabs(kr) < _BIG and fabs(kpr) < _BIG
                                  and fabs(kR) < _BIG):
                    ratio = pow(R / r, 2.0 * dn)
                    p2 = ratio / (4.0 * dn * dn)
                    p2d = ratio / (4.0 * xr * xr)
                    ikR = 1.0 / (2.0 * dn)
                else:
                    p2 = (iR * kr) * (iR * kr) * damp
                    p2d = (iR * kpr) * (iR * kpr) * damp
                    ikR = iR * kR
                w = 1.0 if n == 0 else 2.0
                common = w * beta / (1.0 + gamma * k2 * ikR)
                out[i, j, 0] = common * k2 * p2d
                out[i, j, 1] = common * dn * dn * p2 / (r * r)
                out[i, j, 2] = common * k2 * k2 * p2
    finally:
        free(kvr)
        free(kvR)
        free(ivR)
    return out_arr
