"""Numpy implementations of the hot kernels.

Same contract as the compiled module belllab._core; belllab.backend picks one
at import time. Every function here must return bit-identical results to its
compiled twin: kernels only compare, select and accumulate, all transcendental
evaluation happens upstream in shared numpy code.
"""

from __future__ import annotations

import numpy as np


def signs_pm1(x):
    """+1 where x >= 0 else -1, as int8. The tie at 0 maps to +1."""
    return np.where(np.asarray(x) >= 0.0, 1, -1).astype(np.int8)


def bernoulli_pm1(p, u):
    """+1 where u < p else -1, as int8."""
    return np.where(np.asarray(u) < np.asarray(p), 1, -1).astype(np.int8)


def conditional_outcomes(p_b, u_b, p_plus, p_minus, u_a):
    """Two-stage sampling: B from p_b, then A from p_plus/p_minus given B."""
    b = np.where(np.asarray(u_b) < np.asarray(p_b), 1, -1).astype(np.int8)
    p_a = np.where(b == 1, p_plus, p_minus)
    a = np.where(np.asarray(u_a) < p_a, 1, -1).astype(np.int8)
    return a, b


def four_outcome_pairs(c1, c2, c3, u):
    """Sample (A, B) pairs by inverse CDF with cumulative thresholds.

    u < c1 -> (+1,+1); c1 <= u < c2 -> (+1,-1); c2 <= u < c3 -> (-1,+1);
    otherwise (-1,-1).
    """
    u = np.asarray(u)
    idx = (u >= c1).astype(np.int64) + (u >= c2) + (u >= c3)
    a = np.where(idx <= 1, 1, -1).astype(np.int8)
    b = np.where((idx == 0) | (idx == 2), 1, -1).astype(np.int8)
    return a, b


def pair_counts(a, b):
    """Counts of (+1,+1), (+1,-1), (-1,+1), (-1,-1) outcome pairs."""
    a = np.asarray(a)
    b = np.asarray(b)
    idx = (a < 0).astype(np.intp) * 2 + (b < 0)
    counts = np.bincount(idx, minlength=4)
    return int(counts[0]), int(counts[1]), int(counts[2]), int(counts[3])


def product_sum(a, b):
    """Exact integer sum of elementwise products of two +-1 arrays."""
    return int(np.sum(np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)))


def leapfrog_trajectory(m, omega, kappa, q1, q2, p1, p2, dt, steps):
    """Velocity-Verlet integration of two linearly coupled oscillators.

    Returns (q1, q2, p1, p2) arrays of length steps + 1 including the initial
    state. The arithmetic order matches the compiled kernel exactly.
    """
    n = int(steps)
    q1s = np.empty(n + 1)
    q2s = np.empty(n + 1)
    p1s = np.empty(n + 1)
    p2s = np.empty(n + 1)
    w2 = omega * omega
    f1 = -m * (w2 * q1 + kappa * q2)
    f2 = -m * (w2 * q2 + kappa * q1)
    q1s[0] = q1
    q2s[0] = q2
    p1s[0] = p1
    p2s[0] = p2
    half = 0.5 * dt
    for i in range(1, n + 1):
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
    return q1s, q2s, p1s, p2s


def max_abs_form(corr):
    """Exhaustive grid maximum of |E[a,b]-E[a,b']| + |E[a',b']+E[a',b]|.

    corr is an m x m matrix of pair correlations over one angle grid. Returns
    (value, (ia, iap, ib, ibp)) for the lexicographically first maximizer.
    """
    e = np.ascontiguousarray(corr, dtype=np.float64)
    m = e.shape[0]
    best = -np.inf
    arg = (0, 0, 0, 0)
    for ia in range(m):
        row_a = e[ia]
        d = np.abs(row_a[:, None] - row_a[None, :])
        for iap in range(m):
            row_ap = e[iap]
            s = d + np.abs(row_ap[None, :] + row_ap[:, None])
            k = int(np.argmax(s))
            v = float(s.flat[k])
            if v > best:
                best = v
                arg = (ia, iap, k // m, k % m)
    return best, arg
