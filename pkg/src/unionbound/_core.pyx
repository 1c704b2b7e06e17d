# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: dense-tableau simplex iterations and QPBF enumeration.

The pure-Python twin lives in ``_core_py.py`` and must keep the same
signatures and semantics; ``kernels.py`` picks one at import.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

cdef enum:
    OPTIMAL = 0
    UNBOUNDED = 1
    ITERATION_LIMIT = 2
    INFEASIBLE = 3
    BLAND = 0
    DANTZIG = 1
    DEGENERATE_LIMIT = 50


cdef void _pivot(double[:, ::1] T, long[::1] basis, Py_ssize_t r, Py_ssize_t c) noexcept nogil:
    cdef Py_ssize_t rows = T.shape[0]
    cdef Py_ssize_t cols = T.shape[1]
    cdef Py_ssize_t i, j
    cdef double piv = T[r, c]
    cdef double f
    for j in range(cols):
        T[r, j] /= piv
    T[r, c] = 1.0
    for i in range(rows):
        if i == r:
            continue
        f = T[i, c]
        if f == 0.0:
            continue
        for j in range(cols):
            if T[r, j] != 0.0:
                T[i, j] -= f * T[r, j]
        T[i, c] = 0.0
    basis[r] = c


def pivot(double[:, ::1] T, long[::1] basis, Py_ssize_t r, Py_ssize_t c):
    """Pivot the tableau in place on entry (r, c)."""
    _pivot(T, basis, r, c)


cdef int _run(double[:, ::1] T, long[::1] basis, unsigned char[::1] allowed,
             long max_iter, double opt_tol, double piv_tol, double feas_tol,
             int rule, long* iters) noexcept nogil:
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t N = T.shape[1] - 1
    cdef Py_ssize_t i, j, c, r
    cdef double a, d, theta, amax, rhs
    cdef int bland = rule == BLAND
    cdef long degenerate = 0
    while True:
        # pricing
        c = -1
        if bland:
            for j in range(N):
                if allowed[j] and T[m, j] < -opt_tol:
                    c = j
                    break
        else:
            d = -opt_tol
            for j in range(N):
                if allowed[j] and T[m, j] < d:
                    d = T[m, j]
                    c = j
        if c < 0:
            return OPTIMAL
        if iters[0] >= max_iter:
            return ITERATION_LIMIT
        # Harris pass 1: relaxed step bound
        theta = -1.0
        for i in range(m):
            a = T[i, c]
            if a > piv_tol:
                rhs = T[i, N]
                if rhs < 0.0:
                    rhs = 0.0
                d = (rhs + feas_tol) / a
                if theta < 0.0 or d < theta:
                    theta = d
        if theta < 0.0:
            return UNBOUNDED
        # pass 2: largest pivot among rows within the bound
        r = -1
        amax = 0.0
        for i in range(m):
            a = T[i, c]
            if a > piv_tol:
                rhs = T[i, N]
                if rhs < 0.0:
                    rhs = 0.0
                if rhs / a <= theta and a > amax:
                    amax = a
                    r = i
        if bland:
            # lowest basic index among the well-conditioned candidates
            for i in range(m):
                a = T[i, c]
                if a >= 0.01 * amax and a > piv_tol:
                    rhs = T[i, N]
                    if rhs < 0.0:
                        rhs = 0.0
                    if rhs / a <= theta and basis[i] < basis[r]:
                        r = i
        if T[r, N] / T[r, c] <= 1e-12:
            degenerate += 1
        else:
            degenerate = 0
            bland = rule == BLAND
        if degenerate > DEGENERATE_LIMIT:
            bland = 1
        _pivot(T, basis, r, c)
        for i in range(m):
            if T[i, N] < 0.0 and T[i, N] > -feas_tol:
                T[i, N] = 0.0
        iters[0] += 1


def run_simplex(double[:, ::1] T, long[::1] basis, unsigned char[::1] allowed,
                long max_iter, double opt_tol, double piv_tol, double feas_tol,
                int rule):
    """Primal simplex on a minimisation tableau.

    Layout: rows ``0..m-1`` are constraints, row ``m`` holds reduced costs,
    the last column holds right-hand sides.  ``rule`` 0 prices by Bland's
    rule throughout; 1 prices by most negative reduced cost and falls back
    to Bland's rule after a run of degenerate pivots.  The ratio test is
    Harris's two-pass test.  Returns ``(status, iterations)`` with status
    0 optimal, 1 unbounded, 2 iteration limit.
    """
    cdef long it = 0
    cdef int status
    with nogil:
        status = _run(T, basis, allowed, max_iter, opt_tol, piv_tol, feas_tol, rule, &it)
    return status, it


cdef int _run_dual(double[:, ::1] T, long[::1] basis, unsigned char[::1] allowed,
                  long max_iter, double opt_tol, double piv_tol, double feas_tol,
                  long* iters) noexcept nogil:
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t N = T.shape[1] - 1
    cdef Py_ssize_t i, j, c, r
    cdef double a, d, theta, amax, low
    while True:
        r = -1
        low = -feas_tol
        for i in range(m):
            if T[i, N] < low:
                low = T[i, N]
                r = i
        if r < 0:
            return OPTIMAL
        if iters[0] >= max_iter:
            return ITERATION_LIMIT
        theta = -1.0
        for j in range(N):
            a = T[r, j]
            if allowed[j] and a < -piv_tol:
                d = T[m, j]
                if d < 0.0:
                    d = 0.0
                d = (d + opt_tol) / -a
                if theta < 0.0 or d < theta:
                    theta = d
        if theta < 0.0:
            return INFEASIBLE
        c = -1
        amax = 0.0
        for j in range(N):
            a = T[r, j]
            if allowed[j] and a < -piv_tol:
                d = T[m, j]
                if d < 0.0:
                    d = 0.0
                if d / -a <= theta and -a > amax:
                    amax = -a
                    c = j
        _pivot(T, basis, r, c)
        for j in range(N):
            if T[m, j] < 0.0 and T[m, j] > -opt_tol:
                T[m, j] = 0.0
        iters[0] += 1


def run_dual_simplex(double[:, ::1] T, long[::1] basis, unsigned char[::1] allowed,
                     long max_iter, double opt_tol, double piv_tol, double feas_tol):
    """Dual simplex on a dual-feasible minimisation tableau.

    The leaving row has the most negative right-hand side; the entering
    column comes from a Harris ratio test on the reduced costs.  Returns
    ``(status, iterations)`` with status 0 optimal, 2 iteration limit,
    3 primal infeasible.
    """
    cdef long it = 0
    cdef int status
    with nogil:
        status = _run_dual(T, basis, allowed, max_iter, opt_tol, piv_tol, feas_tol, &it)
    return status, it


def qpbf_min(double a0, double[::1] a1, double[:, ::1] a2):
    """Minimum of a0 + sum a1_i z_i + sum_{i<j} a2_ij z_i z_j over {0,1}^n.

    ``a2`` is symmetric with zero diagonal.  Walks the reflected Gray code so
    each step costs O(n).  Returns ``(value, bitmask)``; among minimisers
    (within a relative 1e-12) the lowest bitmask wins.
    """
    cdef Py_ssize_t n = a1.shape[0]
    cdef long long total = 1LL << n
    cdef long long g, step, mask = 0, best_mask = 0
    cdef Py_ssize_t bit, j
    cdef double val = a0, best = a0, delta, scale = fabs(a0)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] z_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] z = z_arr
    for j in range(n):
        scale += fabs(a1[j])
        for bit in range(j + 1, n):
            scale += fabs(a2[j, bit])
    cdef double tie = 1e-12 * (1.0 + scale)
    with nogil:
        for step in range(1, total):
            # bit that flips between gray(step-1) and gray(step)
            g = step
            bit = 0
            while (g & 1) == 0:
                g >>= 1
                bit += 1
            delta = a1[bit]
            for j in range(n):
                if z[j]:
                    delta += a2[bit, j]
            if z[bit]:
                val -= delta
                z[bit] = 0
                mask ^= (1LL << bit)
            else:
                val += delta
                z[bit] = 1
                mask ^= (1LL << bit)
            if val < best - tie:
                best = val
                best_mask = mask
            elif val <= best + tie and mask < best_mask:
                best_mask = mask
                if val < best:
                    best = val
    return best, best_mask
