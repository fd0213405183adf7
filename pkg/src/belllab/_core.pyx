# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Contract and results are identical to belllab._core_py: comparisons, selects
and accumulations only, in the same order, so both backends agree bit for bit.
"""

import numpy as np

from libc.math cimport fabs


def signs_pm1(const double[::1] x):
    cdef Py_ssize_t n = x.shape[0]
    out_arr = np.empty(n, dtype=np.int8)
    cdef signed char[::1] out = out_arr
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = 1 if x[i] >= 0.0 else -1
    return out_arr


def bernoulli_pm1(const double[::1] p, const double[::1] u):
    cdef Py_ssize_t n = p.shape[0]
    out_arr = np.empty(n, dtype=np.int8)
    cdef signed char[::1] out = out_arr
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = 1 if u[i] < p[i] else -1
    return out_arr


def conditional_outcomes(const double[::1] p_b, const double[::1] u_b,
                         const double[::1] p_plus, const double[::1] p_minus,
                         const double[::1] u_a):
    cdef Py_ssize_t n = p_b.shape[0]
    a_arr = np.empty(n, dtype=np.int8)
    b_arr = np.empty(n, dtype=np.int8)
    cdef signed char[::1] a = a_arr
    cdef signed char[::1] b = b_arr
    cdef Py_ssize_t i
    cdef double pa
    for i in range(n):
        if u_b[i] < p_b[i]:
            b[i] = 1
            pa = p_plus[i]
        else:
            b[i] = -1
            pa = p_minus[i]
        a[i] = 1 if u_a[i] < pa else -1
    return a_arr, b_arr


def four_outcome_pairs(double c1, double c2, double c3, const double[::1] u):
    cdef Py_ssize_t n = u.shape[0]
    a_arr = np.empty(n, dtype=np.int8)
    b_arr = np.empty(n, dtype=np.int8)
    cdef signed char[::1] a = a_arr
    cdef signed char[::1] b = b_arr
    cdef Py_ssize_t i
    cdef double ui
    for i in range(n):
        ui = u[i]
        if ui < c1:
            a[i] = 1
            b[i] = 1
        elif ui < c2:
            a[i] = 1
            b[i] = -1
        elif ui < c3:
            a[i] = -1
            b[i] = 1
        else:
            a[i] = -1
            b[i] = -1
    return a_arr, b_arr


def pair_counts(const signed char[::1] a, const signed char[::1] b):
    cdef long long counts[4]
    cdef Py_ssize_t i, n = a.shape[0]
    cdef int idx
    counts[0] = counts[1] = counts[2] = counts[3] = 0
    for i in range(n):
        # branchless bucket index: bit 1 from side A, bit 0 from side B
        idx = ((a[i] < 0) << 1) | (b[i] < 0)
        counts[idx] += 1
    return int(counts[0]), int(counts[1]), int(counts[2]), int(counts[3])


def product_sum(const signed char[::1] a, const signed char[::1] b):
    cdef long long total = 0
    cdef Py_ssize_t i, n = a.shape[0]
    for i in range(n):
        total += a[i] * b[i]
    return int(total)


def leapfrog_trajectory(double m, double omega, double kappa,
                        double q1, double q2, double p1, double p2,
                        double dt, Py_ssize_t steps):
    q1_arr = np.empty(steps + 1)
    q2_arr = np.empty(steps + 1)
    p1_arr = np.empty(steps + 1)
    p2_arr = np.empty(steps + 1)
    cdef double[::1] q1s = q1_arr
    cdef double[::1] q2s = q2_arr
    cdef double[::1] p1s = p1_arr
    cdef double[::1] p2s = p2_arr
    cdef double w2 = omega * omega
    cdef double f1 = -m * (w2 * q1 + kappa * q2)
    cdef double f2 = -m * (w2 * q2 + kappa * q1)
    cdef double half = 0.5 * dt
    cdef Py_ssize_t i
    q1s[0] = q1
    q2s[0] = q2
    p1s[0] = p1
    p2s[0] = p2
    for i in range(1, steps + 1):
        p1 += half * f1
        p2 += half * f2
        q1 += dt * (p1 / m)
        q2 += dt * (p2 / m)
        f1 = -m * (w2 * q1 + kappa * q2)
        f2 = -m * (w2 * q2 + kappa * q1)
        p1 += half * f1
        p2 += half * f2
        q1s[i] = q1
        q2s[i] = q2
        p1s[i] = p1
        p2s[i] = p2
    return q1_arr, q2_arr, p1_arr, p2_arr


def max_abs_form(const double[:, ::1] corr):
    cdef Py_ssize_t m = corr.shape[0]
    cdef double best = -1.0 / 0.0
    cdef Py_ssize_t ia = 0, iap = 0, ib = 0, ibp = 0
    cdef Py_ssize_t i, j, k, l
    cdef double v
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    v = fabs(corr[i, k] - corr[i, l]) + fabs(corr[j, l] + corr[j, k])
                    if v > best:
                        best = v
                        ia = i
                        iap = j
                        ib = k
                        ibp = l
    return float(best), (int(ia), int(iap), int(ib), int(ibp))
