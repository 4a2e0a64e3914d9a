# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False, language_level=3
"""Compiled hot kernels: packed-bit k-nearest-neighbours and the
stochastic layout optimizer. Mirrors the signatures in _kernels_py."""

from libc.math cimport pow
from libc.stdint cimport int32_t, int64_t, uint64_t

import numpy as np

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #  define MP_POPCOUNT64(x) __builtin_popcountll(x)
    #else
    static int MP_POPCOUNT64(unsigned long long x) {
        int c = 0;
        while (x) { x &= x - 1; ++c; }
        return c;
    }
    #endif
    """
    int MP_POPCOUNT64(unsigned long long x) nogil


def backend_name():
    return "compiled"


def knn_packed(uint64_t[:, ::1] packed, int n_paths, int k):
    """k nearest other rows per row under Russel-Rao, ties to lower index.

    Returns (indices int32 [m,k], distances float64 [m,k]); unused slots
    (when m-1 < k) hold -1 / +inf.
    """
    cdef Py_ssize_t m = packed.shape[0]
    cdef Py_ssize_t w = packed.shape[1]
    idx_arr = np.full((m, k), -1, dtype=np.int32)
    dist_arr = np.full((m, k), np.inf, dtype=np.float64)
    cdef int32_t[:, ::1] idx = idx_arr
    cdef double[:, ::1] dist = dist_arr
    cdef Py_ssize_t i, j, t, p
    cdef int c_tt
    cdef double d, n_f = <double> n_paths

    with nogil:
        for i in range(m):
            for j in range(m):
                if j == i:
                    continue
                c_tt = 0
                for t in range(w):
                    c_tt += MP_POPCOUNT64(packed[i, t] & packed[j, t])
                d = (n_f - c_tt) / n_f
                if d >= dist[i, k - 1]:
                    continue
                p = k - 1
                while p > 0 and dist[i, p - 1] > d:
                    dist[i, p] = dist[i, p - 1]
                    idx[i, p] = idx[i, p - 1]
                    p -= 1
                dist[i, p] = d
                idx[i, p] = <int32_t> j
    return idx_arr, dist_arr


cdef inline double _clip4(double x) nogil:
    if x > 4.0:
        return 4.0
    if x < -4.0:
        return -4.0
    return x


cdef inline uint64_t _xorshift(uint64_t* state) nogil:
    cdef uint64_t x = state[0]
    x ^= x << 13
    x ^= x >> 7
    x ^= x << 17
    state[0] = x
    return x


def optimize_layout(
    double[:, ::1] pos,
    int32_t[::1] heads,
    int32_t[::1] tails,
    double[::1] epochs_per_sample,
    int n_epochs,
    double a,
    double b,
    double gamma,
    double initial_alpha,
    int neg_sample_rate,
    int64_t[::1] sample_cum,
    unsigned long long seed,
    object progress=None,
    object should_cancel=None,
):
    """Sequential edge-sampled layout optimization.

    Attractive forces follow the fitted (a, b) curve along sampled edges;
    each sample also applies ``neg_sample_rate`` repulsive updates against
    targets drawn proportionally to ``sample_cum`` (cumulative row
    multiplicities). Deterministic for a fixed seed. Returns False if
    cancelled.
    """
    cdef Py_ssize_t n_edges = heads.shape[0]
    cdef Py_ssize_t m = pos.shape[0]
    cdef int64_t total = sample_cum[m - 1] if m > 0 else 0
    eons_arr = np.asarray(epochs_per_sample).copy()
    eonns_arr = np.asarray(epochs_per_sample) / neg_sample_rate
    cdef double[::1] eons = eons_arr
    cdef double[::1] eonns = eonns_arr
    cdef double[::1] eps_neg = eonns_arr.copy()
    cdef uint64_t state = seed * 2654435761u + 1u
    cdef Py_ssize_t epoch, e, p, lo, hi, mid
    cdef int32_t j, l, target
    cdef int n_neg, s
    cdef double alpha, dx, dy, d2, grad, gx, gy
    cdef int64_t draw

    for epoch in range(n_epochs):
        alpha = initial_alpha * (1.0 - (<double> epoch) / n_epochs)
        with nogil:
            for e in range(n_edges):
                if eons[e] > epoch:
                    continue
                j = heads[e]
                l = tails[e]
                dx = pos[j, 0] - pos[l, 0]
                dy = pos[j, 1] - pos[l, 1]
                d2 = dx * dx + dy * dy
                if d2 > 0.0:
                    grad = (-2.0 * a * b * pow(d2, b - 1.0)) / (a * pow(d2, b) + 1.0)
                    gx = _clip4(grad * dx)
                    gy = _clip4(grad * dy)
                    pos[j, 0] += gx * alpha
                    pos[j, 1] += gy * alpha
                    pos[l, 0] -= gx * alpha
                    pos[l, 1] -= gy * alpha
                eons[e] += epochs_per_sample[e]
                n_neg = <int> (((<double> epoch) - eonns[e]) / eps_neg[e])
                for s in range(n_neg):
                    draw = <int64_t> (_xorshift(&state) % <uint64_t> total)
                    lo = 0
                    hi = m - 1
                    while lo < hi:
                        mid = (lo + hi) >> 1
                        if sample_cum[mid] <= draw:
                            lo = mid + 1
                        else:
                            hi = mid
                    target = <int32_t> lo
                    if target == j:
                        continue
                    dx = pos[j, 0] - pos[target, 0]
                    dy = pos[j, 1] - pos[target, 1]
                    d2 = dx * dx + dy * dy
                    if d2 > 0.0:
                        grad = (2.0 * gamma * b) / ((0.001 + d2) * (a * pow(d2, b) + 1.0))
                        pos[j, 0] += _clip4(grad * dx) * alpha
                        pos[j, 1] += _clip4(grad * dy) * alpha
                eonns[e] += n_neg * eps_neg[e]
        if progress is not None:
            progress((epoch + 1.0) / n_epochs)
        if should_cancel is not None and should_cancel():
            return False
    return True
